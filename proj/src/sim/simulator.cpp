#include "pimhub/sim/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "pimhub/core/error.hpp"
#include "pimhub/core/url.hpp"

namespace pimhub::sim {

using namespace wire;

namespace {

constexpr std::size_t kMaxDeliveries = 1'000'000;

[[noreturn]] void scenario_error(const std::string &why) {
  throw Error(Errc::ScenarioError, why);
}

void page_fingerprint(const PageNode &n, std::string &out, bool withHidden = true) {
  out += n.tag;
  if (!n.id.empty())
    out += "#" + n.id;
  if (withHidden && n.hidden)
    out += '!';
  out += "\"" + n.text + "\"(";
  for (const auto &c : n.children)
    page_fingerprint(c, out, withHidden);
  out += ')';
}

Json ledger_json(const PresenceLedger &l) {
  Json records = Json::array();
  for (const auto &[k, r] : l.records())
    records.push_back(r);
  Json dir = Json::array();
  for (const auto &[k, s] : l.directory())
    dir.push_back(s);
  return Json{{"records", records}, {"sessions", dir}};
}

} // namespace

std::size_t RunResult::violations() const {
  return std::count_if(failures.begin(), failures.end(),
                       [](const Failure &f) { return f.convergence; });
}

Simulator::Simulator(SimOptions options, std::string scenarioName)
    : options_(options), name_(std::move(scenarioName)), rng_(options.seed),
      dupRng_(options.seed ^ 0x9e3779b97f4a7c15ULL),
      store_(std::make_shared<MemoryStore>()) {
  trace_.push_back("pimhub-trace 1");
  trace_.push_back("scenario " + name_);
  trace_.push_back("seed " + std::to_string(options_.seed));
  new_hub();
}

Simulator::~Simulator() = default;

void Simulator::new_hub() {
  if (hub_)
    flush_hub_log(true);
  HubOptions opt;
  opt.seed = options_.seed + hubCount_++;
  opt.dedupe = !options_.brokenDedupe;
  hub_ = std::make_unique<Hub>(opt, store_);
  logFlushed_ = 0;
  trace_.push_back("hub " + std::to_string(opt.seed) +
                   (opt.dedupe ? " dedupe=1" : " dedupe=0"));
}

void Simulator::flush_hub_log(bool closeSection) {
  append_hub_log(trace_, hub_->log(), logFlushed_);
  logFlushed_ = hub_->log().size();
  if (closeSection)
    trace_.push_back("state " + hub_->state_digest());
}

bool Simulator::chance() {
  if (options_.dupRate <= 0)
    return false;
  return static_cast<double>(dupRng_() >> 11) * 0x1.0p-53 < options_.dupRate;
}

void Simulator::route(std::vector<Delivery> out) {
  for (auto &d : out) {
    auto it = connSlot_.find(d.to);
    if (it == connSlot_.end())
      continue;
    auto &s = slots_[it->second];
    if (d.message.kind() == Kind::SessionCommand)
      s.routed.push_back(d.message);
    auto frame = encode(d.message);
    s.down.push_back(Down{std::move(d), std::move(frame)});
  }
}

void Simulator::pump() {
  for (auto &s : slots_)
    for (auto &m : s.client->take_outbox())
      if (s.hubOpen)
        s.up.push_back(Up{s.conn, encode(m), false});
}

std::size_t Simulator::pending() const {
  std::size_t n = 0;
  for (const auto &s : slots_)
    n += s.up.size() + s.down.size();
  return n;
}

bool Simulator::deliver_one() {
  std::vector<std::pair<std::size_t, bool>> ready; // (slot, up?)
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (!slots_[i].up.empty())
      ready.emplace_back(i, true);
    if (!slots_[i].down.empty())
      ready.emplace_back(i, false);
  }
  if (ready.empty())
    return false;
  auto [idx, up] = ready[rng_() % ready.size()];
  auto &s = slots_[idx];
  if (up) {
    Up item = std::move(s.up.front());
    s.up.pop_front();
    if (item.close) {
      if (item.conn == s.conn)
        s.hubOpen = false;
      route(hub_->close(item.conn));
    } else {
      route(hub_->receive_frame(item.conn, item.frame));
      if (chance())
        route(hub_->receive_frame(item.conn, item.frame));
    }
  } else {
    Down item = std::move(s.down.front());
    s.down.pop_front();
    if (!s.client->connected() || item.delivery.to != s.conn) {
      auto it = std::find(s.routed.begin(), s.routed.end(), item.delivery.message);
      if (it != s.routed.end())
        s.routed.erase(it);
      route(hub_->undeliverable(item.delivery));
    } else {
      auto msg = decode(item.frame);
      s.client->deliver(msg);
      if (chance())
        s.client->deliver(msg);
    }
  }
  pump();
  return true;
}

void Simulator::settle() {
  std::size_t n = 0;
  while (deliver_one())
    if (++n > kMaxDeliveries)
      scenario_error("no quiescence after " + std::to_string(kMaxDeliveries) +
                     " deliveries");
}

void Simulator::await(const std::function<bool()> &done, const std::string &what) {
  while (!done())
    if (!deliver_one())
      scenario_error("quiescent before " + what);
}

Simulator::Slot &Simulator::slot(const std::string &alias) {
  auto it = slotIndex_.find(alias);
  if (it == slotIndex_.end())
    scenario_error("unknown session $" + alias);
  return slots_[it->second];
}

VirtualSession &Simulator::session(const std::string &alias) { return *slot(alias).client; }

const ObjectId &Simulator::object(const std::string &alias) const {
  auto it = objects_.find(alias);
  if (it == objects_.end())
    scenario_error("unknown object @" + alias);
  return it->second;
}

const RuleId &Simulator::rule(const std::string &alias) const {
  auto it = rules_.find(alias);
  if (it == rules_.end())
    scenario_error("unknown rule " + alias);
  return it->second;
}

void Simulator::connect(Slot &s) {
  s.conn = nextConn_++;
  connSlot_[s.conn] = static_cast<std::size_t>(&s - slots_.data());
  s.hubOpen = true;
  route(hub_->open(s.conn));
  s.client->connect();
  pump();
}

std::string Simulator::resolve_value(const std::string &raw) {
  if (raw.size() > 1 && raw.front() == '$') {
    auto &c = session(raw.substr(1));
    if (!c.session_id())
      scenario_error("session " + raw + " has no id yet");
    return c.session_id()->str();
  }
  if (raw.size() > 1 && raw.front() == '@')
    return object(raw.substr(1)).str();
  return raw;
}

Bindings Simulator::resolve_bindings(const std::string &behaviour, const Args &args) {
  const auto *d = hub_->registry().lookup(BehaviourId(behaviour));
  Bindings out;
  for (const auto &[name, raw] : args) {
    ParamKind kind = ParamKind::Text;
    if (d)
      for (const auto &spec : d->meta.params)
        if (spec.name == name)
          kind = spec.kind;
    BindingValue v{kind, {}};
    std::stringstream ss(raw);
    for (std::string item; std::getline(ss, item, ',');)
      v.values.push_back(resolve_value(item));
    out[name] = std::move(v);
  }
  return out;
}

void Simulator::execute(const Step &step, std::size_t index) {
  try {
    std::visit(
        [&](const auto &st) {
          using T = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<T, PageDef>) {
            pages_.define(st.pattern, st.root);
          } else if constexpr (std::is_same_v<T, StartSession>) {
            auto it = slotIndex_.find(st.alias);
            if (it == slotIndex_.end()) {
              SessionConfig cfg{st.alias, UserId(st.user), st.password,
                                DeviceInfo{DeviceId(st.device), st.kind, st.label},
                                !options_.brokenDedupe};
              Slot fresh;
              fresh.client = std::make_unique<VirtualSession>(cfg, pages_);
              slots_.push_back(std::move(fresh));
              it = slotIndex_.emplace(st.alias, slots_.size() - 1).first;
            }
            auto &s = slots_[it->second];
            if (s.client->connected())
              scenario_error("$" + st.alias + " is already connected");
            const auto before = s.client->errors().size();
            connect(s);
            auto &c = *s.client;
            await([&] { return c.welcomed() || c.errors().size() > before; },
                  "Welcome for $" + st.alias);
            if (!c.welcomed())
              scenario_error("hello rejected: " + c.errors().back().code);
          } else if constexpr (std::is_same_v<T, Load>) {
            session(st.session).load(st.url);
          } else if constexpr (std::is_same_v<T, Collect>) {
            auto &c = session(st.session);
            if (objects_.contains(st.object))
              scenario_error("object alias @" + st.object + " already used");
            std::string pattern;
            if (st.pattern) {
              pattern = *st.pattern;
            } else {
              auto norm = normalize_url(c.page().url);
              if (!norm)
                scenario_error("$" + st.session + " has no page loaded");
              pattern = *norm;
            }
            auto id = c.send(CollectObject{st.name, st.tags, st.stereotype,
                                           Locator{pattern, st.path}});
            pump();
            await([&] { return c.ack_for(id) || c.error_for(id); },
                  "Ack for collect @" + st.object);
            if (auto e = c.error_for(id))
              scenario_error("collect rejected: " + e->code + " " + e->message);
            objects_[st.object] = ObjectId(*c.ack_for(id)->ref);
          } else if constexpr (std::is_same_v<T, Attach>) {
            auto &c = session(st.session);
            auto it = c.objects().find(object(st.object));
            if (it == c.objects().end())
              scenario_error("@" + st.object + " not yet known to $" + st.session);
            auto obj = it->second;
            obj.enabledBehaviours.insert(BehaviourId(st.behaviour));
            c.send(UpdateObject{obj});
          } else if constexpr (std::is_same_v<T, DeleteObjectStep>) {
            session(st.session).send(DeleteObject{object(st.object)});
          } else if constexpr (std::is_same_v<T, Invoke>) {
            auto bindings = resolve_bindings(st.behaviour, st.args);
            session(st.session).send(InvokeBehaviour{BehaviourId(st.behaviour), bindings});
          } else if constexpr (std::is_same_v<T, DefineRuleStep>) {
            auto &c = session(st.session);
            Rule r;
            if (auto it = rules_.find(st.rule); it != rules_.end())
              r.ruleId = it->second;
            r.owner = c.config().user;
            auto sel = [&](const SelectorSpec &s) {
              return SessionSelector{s.var, s.kind,
                                     s.kind == SelectorKind::Exact ? resolve_value(s.arg)
                                                                   : s.arg};
            };
            for (const auto &p : st.when) {
              Predicate pred;
              pred.kind = p.kind;
              if (p.kind != PredicateKind::SessionsSameDevice)
                pred.objectId = object(p.object);
              pred.a = sel(p.a);
              if (p.b)
                pred.b = sel(*p.b);
              r.condition.push_back(std::move(pred));
            }
            for (const auto &a : st.actions)
              r.actions.push_back(
                  RuleAction{BehaviourId(a.behaviour), resolve_bindings(a.behaviour, a.args)});
            auto id = c.send(DefineRule{r});
            pump();
            await([&] { return c.ack_for(id) || c.error_for(id); },
                  "Ack for rule " + st.rule);
            if (auto e = c.error_for(id))
              scenario_error("rule rejected: " + e->code +
                             (e->cause ? "(" + *e->cause + ")" : "") + " " + e->message);
            rules_[st.rule] = RuleId(*c.ack_for(id)->ref);
          } else if constexpr (std::is_same_v<T, DeleteRuleStep>) {
            session(st.session).send(DeleteRule{rule(st.rule)});
          } else if constexpr (std::is_same_v<T, Click>) {
            session(st.session).click(object(st.object), st.path, st.type);
          } else if constexpr (std::is_same_v<T, Follow>) {
            session(st.session).follow(object(st.object), st.url);
          } else if constexpr (std::is_same_v<T, Edit>) {
            session(st.session).edit(object(st.object), st.text, st.path);
          } else if constexpr (std::is_same_v<T, CloseSession>) {
            auto &s = slot(st.session);
            if (!s.client->connected())
              scenario_error("$" + st.session + " is not connected");
            s.client->disconnect();
            s.up.push_back(Up{s.conn, "", true});
          } else if constexpr (std::is_same_v<T, Settle>) {
            settle();
          } else if constexpr (std::is_same_v<T, Restart>) {
            settle();
            std::vector<Slot *> live;
            for (auto &s : slots_)
              if (s.client->connected()) {
                s.client->disconnect();
                s.hubOpen = false;
                live.push_back(&s);
              }
            new_hub();
            for (auto *s : live)
              connect(*s);
            await(
                [&] {
                  return std::all_of(live.begin(), live.end(),
                                     [](Slot *s) { return s->client->welcomed(); });
                },
                "Welcome after restart");
          } else if constexpr (std::is_same_v<T, Expect>) {
            settle();
            check(st, index, step.line);
          }
        },
        step.body);
  } catch (const Error &e) {
    throw Error(Errc::ScenarioError,
                "step " + std::to_string(index) + " (line " + std::to_string(step.line) +
                    ", '" + step.source + "'): " + e.what(),
                e.code() == Errc::ScenarioError ? std::nullopt
                                                : std::optional<Errc>(e.code()));
  }
  pump();
  if (!std::holds_alternative<Expect>(step.body) && !std::holds_alternative<Settle>(step.body)) {
    // let part of the traffic through before the next step
    auto k = rng_() % (pending() + 1);
    for (std::size_t i = 0; i < k && deliver_one(); ++i) {
    }
  }
}

void Simulator::check(const Expect &e, std::size_t index, std::size_t line) {
  auto fail = [&](const std::string &msg) {
    failures_.push_back(Failure{index, line, msg, false});
  };
  auto sid = [&]() -> SessionId {
    auto &c = session(e.session);
    if (!c.session_id())
      scenario_error("$" + e.session + " has no session id");
    return *c.session_id();
  };
  switch (e.kind) {
  case ExpectKind::Online:
  case ExpectKind::Offline: {
    auto want = e.kind == ExpectKind::Online ? PresenceState::Online : PresenceState::Offline;
    auto got = hub_->ledger().state(object(e.subject), sid());
    if (got != want)
      fail("@" + e.subject + " is " + std::string(to_string(got)) + " in $" + e.session);
    break;
  }
  case ExpectKind::OnlineExactly: {
    const auto s = sid();
    std::set<ObjectId> got, want;
    for (const auto &[k, r] : hub_->ledger().records())
      if (r.sessionId == s && r.state == PresenceState::Online)
        got.insert(r.objectId);
    for (const auto &a : e.list)
      want.insert(object(a));
    if (got != want) {
      std::string g;
      for (const auto &o : got)
        g += " " + o.str();
      fail("online in $" + e.session + ":" + (g.empty() ? " (none)" : g));
    }
    break;
  }
  case ExpectKind::Applied: {
    auto action = parse_command_action(e.subject);
    if (!action)
      scenario_error("unknown command action " + e.subject);
    auto n = session(e.session).count_applied(*action);
    if (n != e.count)
      fail("$" + e.session + " applied " + std::to_string(n) + " " + e.subject +
           ", expected " + std::to_string(e.count));
    break;
  }
  case ExpectKind::Url: {
    const auto &url = session(e.session).page().url;
    if (url != e.text)
      fail("$" + e.session + " is at " + url);
    break;
  }
  case ExpectKind::Text: {
    const auto *el = session(e.session).element(object(e.subject));
    auto rel = parse_relative_path(e.path);
    if (!rel)
      scenario_error("bad path " + e.path);
    if (el)
      el = resolve_path(*rel, *el);
    if (!el)
      fail("@" + e.subject + e.path + " is not on the page of $" + e.session);
    else if (el->text != e.text)
      fail("@" + e.subject + " text in $" + e.session + " is \"" + el->text + "\"");
    break;
  }
  case ExpectKind::Hidden:
  case ExpectKind::Visible: {
    const auto *el = session(e.session).element(object(e.subject));
    if (!el)
      fail("@" + e.subject + " is not on the page of $" + e.session);
    else if (el->hidden != (e.kind == ExpectKind::Hidden))
      fail("@" + e.subject + " is " + (el->hidden ? "hidden" : "visible") + " in $" +
           e.session);
    break;
  }
  case ExpectKind::Fired: {
    auto n = hub_->fire_count(rule(e.subject));
    if (n != e.count)
      fail("rule " + e.subject + " fired " + std::to_string(n) + " times, expected " +
           std::to_string(e.count));
    break;
  }
  case ExpectKind::ErrorCount: {
    const auto &errs = session(e.session).errors();
    auto n = std::count_if(errs.begin(), errs.end(),
                           [&](const ErrorMsg &m) { return m.code == e.subject; });
    if (static_cast<std::size_t>(n) != e.count)
      fail("$" + e.session + " got " + std::to_string(n) + " " + e.subject +
           " errors, expected " + std::to_string(e.count));
    break;
  }
  case ExpectKind::Objects: {
    auto n = session(e.session).objects().size();
    if (n != e.count)
      fail("$" + e.session + " holds " + std::to_string(n) + " objects");
    break;
  }
  case ExpectKind::Converged:
    for (auto &v : convergence_violations())
      failures_.push_back(Failure{index, line, v, true});
    break;
  }
}

std::vector<std::string> Simulator::convergence_violations() const {
  std::vector<std::string> out;
  if (pending())
    out.push_back(std::to_string(pending()) + " messages still in flight");
  for (const auto &s : slots_) {
    const auto &c = *s.client;
    if (!c.connected() || !c.welcomed() || !s.hubOpen)
      continue;
    const auto &user = c.config().user;
    if (c.ledger() != hub_->ledger().view_for(user))
      out.push_back("ledger view of $" + c.alias() + " differs from the hub");
    auto pim = hub_->pim_for(user);
    std::map<ObjectId, UIObject> objs;
    for (const auto &o : pim.objects)
      objs.emplace(o.objectId, o);
    std::map<RuleId, Rule> rules;
    for (const auto &r : pim.rules)
      rules.emplace(r.ruleId, r);
    if (c.objects() != objs)
      out.push_back("objects of $" + c.alias() + " differ from the hub");
    if (c.rules() != rules)
      out.push_back("rules of $" + c.alias() + " differ from the hub");
    if (c.commands() != s.routed)
      out.push_back("$" + c.alias() + " applied " + std::to_string(c.commands().size()) +
                    " commands, hub routed " + std::to_string(s.routed.size()));
  }
  // Mirrored objects must read the same in every session forwarding edits.
  for (const auto &r : hub_->routes()) {
    if (r.kind != RouteKind::Mirror)
      continue;
    std::optional<std::string> first;
    std::string firstAlias;
    for (const auto &s : slots_) {
      const auto &c = *s.client;
      if (!c.connected() || !s.hubOpen || !c.captures(r.object, CaptureStream::Mutation))
        continue;
      const auto *el = c.element(r.object);
      if (!el)
        continue;
      std::string print;
      page_fingerprint(*el, print, false);
      if (!first) {
        first = print;
        firstAlias = c.alias();
      } else if (*first != print) {
        out.push_back("mirrored " + r.object.str() + " differs between $" + firstAlias +
                      " and $" + c.alias());
      }
    }
  }
  return out;
}

RunResult Simulator::finish() {
  settle();
  for (auto &v : convergence_violations())
    failures_.push_back(Failure{0, 0, v, true});
  flush_hub_log(true);
  Json views = Json::array();
  for (const auto &s : slots_) {
    const auto &c = *s.client;
    Json cmds = Json::array();
    for (const auto &m : c.commands())
      cmds.push_back(encode(m));
    std::string page;
    page_fingerprint(c.page().root, page);
    Json objs = Json::array();
    for (const auto &[id, o] : c.objects())
      objs.push_back(o);
    Json rules = Json::array();
    for (const auto &[id, r] : c.rules())
      rules.push_back(r);
    views.push_back(Json{{"alias", c.alias()},
                         {"session", c.session_id() ? c.session_id()->str() : ""},
                         {"ledger", ledger_json(c.ledger())},
                         {"objects", objs},
                         {"rules", rules},
                         {"commands", cmds},
                         {"url", c.page().url},
                         {"page", page},
                         {"errors", c.errors().size()}});
    for (const auto &m : c.commands())
      trace_.push_back("applied " + c.alias() + " " + encode(m));
  }
  trace_.push_back("end");
  RunResult r;
  r.failures = failures_;
  r.trace = Trace{trace_};
  r.digest = hub_->state_digest();
  r.fingerprint = sha256_hex(r.digest + views.dump());
  return r;
}

RunResult run_scenario(const Scenario &scenario, const SimOptions &options) {
  const auto t0 = std::chrono::steady_clock::now();
  Simulator sim(options, scenario.name);
  const std::size_t n = std::min(scenario.steps.size(),
                                 options.stepLimit.value_or(scenario.steps.size()));
  for (std::size_t i = 0; i < n; ++i)
    sim.execute(scenario.steps[i], i + 1);
  auto r = sim.finish();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

} // namespace pimhub::sim
