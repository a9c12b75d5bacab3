#include "pimhub/hub/hub.hpp"

#include <algorithm>

#include "pimhub/behaviour/builtins.hpp"
#include "pimhub/core/error.hpp"
#include "pimhub/core/url.hpp"

namespace pimhub {

using namespace wire;

std::string_view to_string(LogEvent e) noexcept {
  switch (e) {
  case LogEvent::Open: return "open";
  case LogEvent::In: return "in";
  case LogEvent::Out: return "out";
  case LogEvent::Close: return "close";
  case LogEvent::Gone: return "gone";
  }
  return "?";
}

struct Hub::Ctx {
  ConnectionId conn;
  std::optional<SessionId> session;
  UserId user;
  std::string msgId;
  std::uint64_t accepted = 0;
  std::vector<Delivery> out;

  const SessionId &require_session() const {
    if (!session)
      throw Error(Errc::UnexpectedMessage, "no Hello on this connection yet");
    return *session;
  }
  void ack(Hub &hub, std::optional<std::string> ref = std::nullopt) {
    hub.send(out, conn, Ack{msgId, accepted, std::move(ref)}, session);
  }
};

Hub::Hub(HubOptions options, std::shared_ptr<PimStore> store)
    : options_(options), store_(std::move(store)), rng_(options.seed) {
  builtin::register_builtins(registry_);
  lookup_ = [this](const ObjectId &id) { return find_object(id); };
  if (store_) {
    if (auto loaded = store_->load())
      durable_ = std::move(*loaded);
  }
  for (const auto &[user, rec] : durable_.users)
    for (const auto &[id, obj] : rec.objects)
      objectOwner_.emplace(id, user);
  compile_all();
}

void Hub::compile_all() {
  compiled_.clear();
  for (const auto &[user, rec] : durable_.users) {
    for (const auto &[id, rule] : rec.rules) {
      try {
        compiled_[user].emplace(id, compile_rule(rule, registry_, lookup_));
      } catch (const Error &e) {
        throw Error(Errc::CorruptStore, "stored rule " + id.str() + ": " + e.what(),
                    e.code());
      }
    }
  }
}

void Hub::persist() {
  if (store_)
    store_->save(durable_);
}

const UIObject *Hub::find_object(const ObjectId &id) const {
  auto it = objectOwner_.find(id);
  if (it == objectOwner_.end())
    return nullptr;
  const auto &objs = durable_.users.at(it->second).objects;
  auto o = objs.find(id);
  return o == objs.end() ? nullptr : &o->second;
}

std::uint64_t Hub::fire_count(const RuleId &rule) const {
  auto it = fireCounts_.find(rule);
  return it == fireCounts_.end() ? 0 : it->second;
}

std::optional<SessionId> Hub::session_of(ConnectionId conn) const {
  auto it = conns_.find(conn);
  if (it == conns_.end())
    return std::nullopt;
  return it->second.session;
}

std::optional<ConnectionId> Hub::connection_of(const SessionId &session) const {
  auto it = sessionConn_.find(session);
  if (it == sessionConn_.end())
    return std::nullopt;
  return it->second;
}

PimSnapshot Hub::pim_for(const UserId &user) const {
  PimSnapshot snap;
  auto it = durable_.users.find(user);
  if (it == durable_.users.end())
    return snap;
  for (const auto &[id, o] : it->second.objects)
    snap.objects.push_back(o);
  for (const auto &[id, r] : it->second.rules)
    snap.rules.push_back(r);
  return snap;
}

Json Hub::state_json() const {
  Json records = Json::array();
  for (const auto &[k, r] : ledger_.records())
    records.push_back(r);
  Json dir = Json::array();
  for (const auto &[k, s] : ledger_.directory())
    dir.push_back(s);
  Json routes = Json::array();
  for (const auto &r : routes_)
    routes.push_back(Json{{"kind", to_string(r.kind)},
                          {"owner", r.owner.str()},
                          {"object", r.object.str()},
                          {"source", r.source.str()},
                          {"target", r.target.str()}});
  Json firing = Json::object();
  for (const auto &[id, f] : firing_)
    firing[id.str()] = Json{{"value", f.lastValue}, {"bindings", f.lastBindings},
                            {"fired", fire_count(id)}};
  return Json{{"durable", Json::parse(serialize_state(durable_))},
              {"ledger", Json{{"records", records}, {"sessions", dir}}},
              {"routes", routes},
              {"firing", firing},
              {"nextSeq", seq_.peek()}};
}

std::string Hub::state_digest() const { return sha256_hex(state_json().dump()); }

// ---------------------------------------------------------------------------
// delivery helpers

void Hub::send(std::vector<Delivery> &out, ConnectionId to, Payload payload,
               const std::optional<SessionId> &origin) {
  WireMessage msg{"h" + std::to_string(outCounter_++), std::nullopt, std::move(payload)};
  msg = seq_.assign(std::move(msg));
  out.push_back(Delivery{to, std::move(msg), origin});
}

void Hub::send_session(std::vector<Delivery> &out, const SessionId &to, Payload payload,
                       const std::optional<SessionId> &origin) {
  auto conn = connection_of(to);
  if (!conn || !ledger_.is_live(to))
    return; // never route to a session that is not in the directory
  send(out, *conn, std::move(payload), origin);
}

void Hub::broadcast(std::vector<Delivery> &out, const UserId &user,
                    const Payload &payload, const std::optional<SessionId> &except,
                    const std::optional<SessionId> &origin) {
  for (const auto &s : ledger_.live_sessions(user))
    if (!except || s != *except)
      send_session(out, s, payload, origin);
}

void Hub::route_plan(std::vector<Delivery> &out, const Plan &plan,
                     const std::optional<SessionId> &origin) {
  for (const auto &cmd : plan.commands)
    send_session(out, cmd.target, SessionCommandMsg{cmd}, origin);
  for (const auto &r : plan.routes)
    routes_.insert(r);
}

void Hub::run_rules(std::vector<Delivery> &out, const UserId &user,
                    const std::optional<SessionId> &origin) {
  auto it = compiled_.find(user);
  if (it == compiled_.end() || it->second.empty())
    return;
  std::vector<const CompiledRule *> rules;
  rules.reserve(it->second.size());
  for (const auto &[id, r] : it->second)
    rules.push_back(&r);
  auto invocations = on_state_change(rules, firing_, ledger_, lookup_, origin);
  for (const auto &inv : invocations) {
    ++fireCounts_[inv.rule];
    for (const auto &act : inv.actions) {
      if (act.plan) {
        route_plan(out, *act.plan, origin);
        continue;
      }
      const auto &e = *act.error;
      std::optional<std::string> cause;
      if (e.cause())
        cause = std::string(to_string(*e.cause()));
      ErrorMsg err{std::string(to_string(e.code())), cause,
                   "rule " + inv.rule.str() + " action " + act.behaviour.str() + ": " +
                       e.what(),
                   std::nullopt};
      broadcast(out, user, err, std::nullopt, origin);
    }
  }
}

UserRecord &Hub::user_record(const UserId &user) { return durable_.users.at(user); }

UIObject &Hub::owned_object(const UserId &user, const ObjectId &id) {
  auto it = objectOwner_.find(id);
  if (it == objectOwner_.end())
    throw Error(Errc::UnknownObject, id.str());
  if (it->second != user)
    throw Error(Errc::NotOwner, id.str());
  return user_record(user).objects.at(id);
}

bool Hub::behaviour_visible(const UserId &user, const BehaviourRecord &r) const {
  return r.repo.isPublic || r.repo.owner == user;
}

void Hub::check_attachable(const UserId &user, const UIObject &obj) const {
  for (const auto &b : obj.enabledBehaviours) {
    const BehaviourMeta *meta = nullptr;
    if (const auto *d = registry_.lookup(b))
      meta = &d->meta;
    else if (auto r = durable_.repo.find(b);
             r != durable_.repo.end() && behaviour_visible(user, r->second))
      meta = &r->second.meta;
    if (!meta)
      throw Error(Errc::UnknownBehaviour, b.str());
    if (!meta->applicability.applies_to(obj.stereotype))
      throw Error(Errc::StereotypeMismatch,
                  b.str() + " does not apply to " + std::string(to_string(obj.stereotype)));
  }
}

// ---------------------------------------------------------------------------
// transport entry points

std::vector<Delivery> Hub::open(ConnectionId conn) {
  conns_[conn];
  if (options_.keepLog)
    log_.push_back(LogEntry{LogEvent::Open, conn, std::nullopt, std::nullopt});
  return {};
}

std::vector<Delivery> Hub::receive_frame(ConnectionId conn, std::string_view frame) {
  WireMessage msg;
  try {
    msg = decode(frame);
  } catch (const Error &e) {
    std::vector<Delivery> out;
    send(out, conn,
         ErrorMsg{std::string(to_string(e.code())), std::nullopt, e.what(), std::nullopt},
         session_of(conn));
    if (options_.keepLog)
      for (const auto &d : out)
        log_.push_back(LogEntry{LogEvent::Out, d.to, d.message, std::nullopt});
    return out;
  }
  return receive(conn, std::move(msg));
}

std::vector<Delivery> Hub::receive(ConnectionId conn, WireMessage msg) {
  auto &c = conns_[conn];
  if (options_.dedupe && !c.seen.insert(msg.msgId).second)
    return {};

  Ctx ctx{conn, c.session, {}, msg.msgId, 0, {}};
  if (ctx.session)
    ctx.user = ledger_.session(*ctx.session)->user;

  if (msg.serverSeq) {
    send(ctx.out, conn,
         ErrorMsg{std::string(to_string(Errc::AlreadySequenced)), std::nullopt,
                  "clients must not set serverSeq", msg.msgId},
         ctx.session);
  } else {
    msg = seq_.assign(std::move(msg));
    ctx.accepted = *msg.serverSeq;
    if (options_.keepLog)
      log_.push_back(LogEntry{LogEvent::In, conn, msg, std::nullopt});
    try {
      dispatch(ctx, msg);
    } catch (const Error &e) {
      std::optional<std::string> cause;
      if (e.cause())
        cause = std::string(to_string(*e.cause()));
      send(ctx.out, conn,
           ErrorMsg{std::string(to_string(e.code())), cause, e.what(), msg.msgId},
           ctx.session);
    }
  }
  if (options_.keepLog)
    for (const auto &d : ctx.out)
      log_.push_back(LogEntry{LogEvent::Out, d.to, d.message, std::nullopt});
  return std::move(ctx.out);
}

std::vector<Delivery> Hub::close(ConnectionId conn) {
  std::vector<Delivery> out;
  auto it = conns_.find(conn);
  if (options_.keepLog)
    log_.push_back(LogEntry{LogEvent::Close, conn, std::nullopt, std::nullopt});
  if (it == conns_.end())
    return out;
  auto session = it->second.session;
  conns_.erase(it);
  if (!session)
    return out;
  sessionConn_.erase(*session);
  if (!ledger_.is_live(*session))
    return out;

  const UserId user = ledger_.session(*session)->user;
  auto changed = ledger_.close_session(*session);

  // Drop every route touching the session; the other party hears about it.
  std::vector<Route> dropped;
  for (auto r = routes_.begin(); r != routes_.end();) {
    if (r->source == *session || r->target == *session) {
      dropped.push_back(*r);
      r = routes_.erase(r);
    } else {
      ++r;
    }
  }
  for (const auto &r : dropped) {
    const SessionId &other = r.source == *session ? r.target : r.source;
    send_session(out, other,
                 ErrorMsg{std::string(to_string(Errc::RouteClosed)), std::nullopt,
                          std::string(to_string(r.kind)) + " " + r.object.str() +
                              " closed: session " + session->str() + " left",
                          std::nullopt},
                 std::nullopt);
  }
  for (const auto &rec : changed)
    lastOriginSeq_.erase({rec.objectId, rec.sessionId});

  broadcast(out, user, PresenceUpdate{std::nullopt, changed, {*ledger_.session(*session)}},
            std::nullopt, std::nullopt);
  run_rules(out, user, std::nullopt);
  if (options_.keepLog)
    for (const auto &d : out)
      log_.push_back(LogEntry{LogEvent::Out, d.to, d.message, std::nullopt});
  return out;
}

std::vector<Delivery> Hub::undeliverable(const Delivery &d) {
  std::vector<Delivery> out;
  if (options_.keepLog)
    log_.push_back(LogEntry{LogEvent::Gone, d.to, d.message, d.origin});
  const auto *cmd = d.message.as<SessionCommandMsg>();
  if (!cmd || !d.origin)
    return out;
  send_session(out, *d.origin,
               ErrorMsg{std::string(to_string(Errc::TargetGone)), std::nullopt,
                        std::string(to_string(cmd->command.action)) + " to " +
                            cmd->command.target.str() + " dropped",
                        std::nullopt},
               std::nullopt);
  if (options_.keepLog)
    for (const auto &o : out)
      log_.push_back(LogEntry{LogEvent::Out, o.to, o.message, std::nullopt});
  return out;
}

// ---------------------------------------------------------------------------
// handlers

void Hub::dispatch(Ctx &ctx, const WireMessage &msg) {
  std::visit(
      [&](const auto &p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Hello>) {
          on_hello(ctx, p);
        } else if constexpr (std::is_same_v<T, CollectObject>) {
          on_collect(ctx, p);
        } else if constexpr (std::is_same_v<T, UpdateObject>) {
          on_update(ctx, p);
        } else if constexpr (std::is_same_v<T, DeleteObject>) {
          on_delete(ctx, p);
        } else if constexpr (std::is_same_v<T, DefineRule>) {
          on_define_rule(ctx, p);
        } else if constexpr (std::is_same_v<T, DeleteRule>) {
          on_delete_rule(ctx, p);
        } else if constexpr (std::is_same_v<T, PresenceUpdate>) {
          on_presence(ctx, p);
        } else if constexpr (std::is_same_v<T, InvokeBehaviour>) {
          on_invoke(ctx, p);
        } else if constexpr (std::is_same_v<T, DomEvent>) {
          on_dom_event(ctx, p);
        } else if constexpr (std::is_same_v<T, NavigationCommand>) {
          on_navigation(ctx, p);
        } else if constexpr (std::is_same_v<T, ContentMutation>) {
          on_mutation(ctx, p);
        } else if constexpr (std::is_same_v<T, UploadBehaviour>) {
          on_upload(ctx, p);
        } else if constexpr (std::is_same_v<T, FetchBehaviour>) {
          on_fetch(ctx, p);
        } else {
          throw Error(Errc::UnexpectedMessage,
                      std::string(to_string(msg.kind())) + " is hub-to-client only");
        }
      },
      msg.payload);
}

void Hub::on_hello(Ctx &ctx, const Hello &m) {
  if (ctx.session)
    throw Error(Errc::UnexpectedMessage, "connection already has a session");
  auto it = durable_.users.find(m.user);
  if (it == durable_.users.end()) {
    if (!m.registerUser)
      throw Error(Errc::AuthFailed, "unknown user " + m.user.str());
    UserRecord rec;
    rec.credentials = make_credentials(m.password, random_hex(rng_, 16));
    it = durable_.users.emplace(m.user, std::move(rec)).first;
  } else if (!verify_password(it->second.credentials, m.password)) {
    throw Error(Errc::AuthFailed, "bad credentials for " + m.user.str());
  }

  IdSequence ids("s", durable_.counters.nextSession);
  const auto session = ids.next<SessionId>();
  durable_.counters.nextSession = ids.peek();
  persist();

  SessionEntry entry{session, m.user, m.device, "", true};
  ledger_.upsert_session(entry);
  conns_[ctx.conn].session = session;
  sessionConn_[session] = ctx.conn;
  ctx.session = session;
  ctx.user = m.user;

  Welcome w{session, random_hex(rng_, 32), pim_for(m.user), {}};
  const auto view = ledger_.view_for(m.user);
  for (const auto &[k, s] : view.directory())
    w.ledger.sessions.push_back(s);
  for (const auto &[k, r] : view.records())
    w.ledger.records.push_back(r);
  send(ctx.out, ctx.conn, std::move(w), session);
  broadcast(ctx.out, m.user, PresenceUpdate{std::nullopt, {}, {entry}}, session, session);
  run_rules(ctx.out, m.user, session);
}

void Hub::on_collect(Ctx &ctx, const CollectObject &m) {
  const auto &session = ctx.require_session();
  IdSequence ids("o", durable_.counters.nextObject);
  CollectRequest req{ctx.user, m.locator, m.stereotype, m.name, m.tags};
  auto obj = collect_object(req, ids, ctx.accepted);
  durable_.counters.nextObject = ids.peek();
  objectOwner_.emplace(obj.objectId, ctx.user);
  user_record(ctx.user).objects.emplace(obj.objectId, obj);
  persist();
  broadcast(ctx.out, ctx.user, UpdateObject{obj}, std::nullopt, session);
  ctx.ack(*this, obj.objectId.str());
}

void Hub::on_update(Ctx &ctx, const UpdateObject &m) {
  const auto &session = ctx.require_session();
  auto &current = owned_object(ctx.user, m.object.objectId);
  const auto &next = m.object;
  if (next.owner != current.owner)
    throw Error(Errc::NotOwner, "owner is immutable");
  if (next.createdAt != current.createdAt)
    throw Error(Errc::SchemaViolation, "createdAt is immutable");
  if (next.name.empty())
    throw Error(Errc::EmptyName, next.objectId.str());
  if (!is_well_formed(next.locator))
    throw Error(Errc::MalformedLocator, next.objectId.str());
  check_attachable(ctx.user, next);
  // A stereotype change must not break rules that attach media behaviours.
  auto backup = current;
  current = next;
  for (const auto &[id, rule] : user_record(ctx.user).rules) {
    try {
      compile_rule(rule, registry_, lookup_);
    } catch (const Error &e) {
      current = backup;
      throw Error(Errc::ObjectInUse, "rule " + id.str() + ": " + e.what(), e.code());
    }
  }
  persist();
  broadcast(ctx.out, ctx.user, UpdateObject{next}, std::nullopt, session);
  ctx.ack(*this, next.objectId.str());
}

namespace {
bool rule_mentions(const Rule &rule, const ObjectId &object,
                   const BehaviourRegistry &registry) {
  for (const auto &p : rule.condition)
    if (p.objectId && *p.objectId == object)
      return true;
  for (const auto &a : rule.actions) {
    const auto *d = registry.lookup(a.behaviour);
    for (const auto &[name, v] : a.bindings) {
      if (v.kind != ParamKind::ObjectRef)
        continue;
      if (d && std::none_of(d->meta.params.begin(), d->meta.params.end(),
                            [&](const ParameterSpec &s) { return s.name == name; }))
        continue;
      if (std::find(v.values.begin(), v.values.end(), object.str()) != v.values.end())
        return true;
    }
  }
  return false;
}
} // namespace

void Hub::on_delete(Ctx &ctx, const DeleteObject &m) {
  const auto &session = ctx.require_session();
  owned_object(ctx.user, m.object);
  auto &rec = user_record(ctx.user);
  for (const auto &[id, rule] : rec.rules)
    if (rule_mentions(rule, m.object, registry_))
      throw Error(Errc::ObjectInUse, "referenced by rule " + id.str());
  rec.objects.erase(m.object);
  objectOwner_.erase(m.object);
  ledger_.erase_object(m.object);
  std::erase_if(routes_, [&](const Route &r) { return r.object == m.object; });
  std::erase_if(lastOriginSeq_, [&](const auto &kv) { return kv.first.first == m.object; });
  persist();
  broadcast(ctx.out, ctx.user, DeleteObject{m.object}, std::nullopt, session);
  ctx.ack(*this, m.object.str());
}

void Hub::on_define_rule(Ctx &ctx, const DefineRule &m) {
  const auto &session = ctx.require_session();
  Rule rule = m.rule;
  if (!rule.owner.empty() && rule.owner != ctx.user)
    throw Error(Errc::NotOwner, "rule owner must be the session user");
  rule.owner = ctx.user;
  auto &rec = user_record(ctx.user);
  bool fresh = rule.ruleId.empty();
  if (fresh) {
    rule.createdAt = ctx.accepted;
  } else {
    auto it = rec.rules.find(rule.ruleId);
    if (it == rec.rules.end()) {
      // another user's rule id, or never issued
      throw Error(Errc::NotFound, "rule " + rule.ruleId.str());
    }
    rule.createdAt = it->second.createdAt;
  }
  for (const auto &p : rule.condition)
    if (p.objectId) {
      auto o = objectOwner_.find(*p.objectId);
      if (o != objectOwner_.end() && o->second != ctx.user)
        throw Error(Errc::NotOwner, p.objectId->str());
    }
  IdSequence ids("r", durable_.counters.nextRule);
  if (fresh)
    rule.ruleId = ids.next<RuleId>(); // counter only advances if compile succeeds
  auto compiled = compile_rule(rule, registry_, lookup_);
  if (fresh)
    durable_.counters.nextRule = ids.peek();
  rec.rules[rule.ruleId] = rule;
  compiled_[ctx.user].insert_or_assign(rule.ruleId, std::move(compiled));
  firing_.erase(rule.ruleId);
  persist();
  broadcast(ctx.out, ctx.user, DefineRule{rule}, std::nullopt, session);
  ctx.ack(*this, rule.ruleId.str());
  run_rules(ctx.out, ctx.user, session);
}

void Hub::on_delete_rule(Ctx &ctx, const DeleteRule &m) {
  const auto &session = ctx.require_session();
  auto &rec = user_record(ctx.user);
  if (!rec.rules.erase(m.rule))
    throw Error(Errc::NotFound, "rule " + m.rule.str());
  compiled_[ctx.user].erase(m.rule);
  firing_.erase(m.rule);
  persist();
  broadcast(ctx.out, ctx.user, DeleteRule{m.rule}, std::nullopt, session);
  ctx.ack(*this, m.rule.str());
}

void Hub::on_presence(Ctx &ctx, const PresenceUpdate &m) {
  const auto &session = ctx.require_session();
  if (!m.sessions.empty())
    throw Error(Errc::SchemaViolation, "clients do not send directory entries");
  for (const auto &r : m.records)
    if (r.sessionId != session)
      throw Error(Errc::SpoofedSession, r.sessionId.str() + " is not " + session.str());

  PresenceUpdate fanout;
  if (m.url) {
    SessionEntry entry = *ledger_.session(session);
    if (entry.currentUrl != *m.url) {
      entry.currentUrl = *m.url;
      ledger_.upsert_session(entry);
      fanout.sessions.push_back(entry);
    }
  }
  // Records for objects deleted in flight are skipped; the rest still apply
  // so the sender's own view stays in step with the hub.
  std::vector<std::string> unknown;
  for (const auto &r : m.records) {
    auto o = objectOwner_.find(r.objectId);
    if (o == objectOwner_.end() || o->second != ctx.user) {
      unknown.push_back(r.objectId.str());
      continue;
    }
    if (ledger_.apply(r))
      fanout.records.push_back(*ledger_.record(r.objectId, r.sessionId));
  }
  if (!fanout.records.empty() || !fanout.sessions.empty())
    broadcast(ctx.out, ctx.user, fanout, session, session);
  if (!fanout.records.empty())
    run_rules(ctx.out, ctx.user, session);
  if (!unknown.empty()) {
    std::string list;
    for (const auto &u : unknown)
      list += (list.empty() ? "" : ",") + u;
    send(ctx.out, ctx.conn,
         ErrorMsg{std::string(to_string(Errc::UnknownObject)), std::nullopt,
                  "skipped records for " + list, ctx.msgId},
         session);
  }
}

void Hub::on_invoke(Ctx &ctx, const InvokeBehaviour &m) {
  const auto &session = ctx.require_session();
  const auto *d = registry_.lookup(m.behaviour);
  if (!d) {
    if (durable_.repo.contains(m.behaviour))
      throw Error(Errc::UnknownBehaviour,
                  m.behaviour.str() + " is a repository script; the hub cannot plan it");
    throw Error(Errc::UnknownBehaviour, m.behaviour.str());
  }
  try {
    validate_bindings(d->meta, m.bindings);
  } catch (const Error &e) {
    throw Error(Errc::BindingError, e.what(), e.code());
  }
  for (const auto &spec : d->meta.params) {
    auto b = m.bindings.find(spec.name);
    if (b == m.bindings.end() || spec.kind != ParamKind::ObjectRef)
      continue;
    for (const auto &v : b->second.values) {
      auto o = objectOwner_.find(ObjectId(v));
      if (o != objectOwner_.end() && o->second != ctx.user)
        throw Error(Errc::NotOwner, v);
    }
  }
  Plan plan;
  try {
    plan = d->planner(PlanRequest{m.bindings, ledger_, lookup_, ctx.user, session});
  } catch (const Error &e) {
    throw Error(Errc::PlannerError, e.what(), e.code());
  }
  route_plan(ctx.out, plan, session);
  ctx.ack(*this);
}

void Hub::on_dom_event(Ctx &ctx, const DomEvent &m) {
  const auto &session = ctx.require_session();
  owned_object(ctx.user, m.event.objectId);
  for (const auto &r : routes_) {
    if (r.kind != RouteKind::Redirect || r.object != m.event.objectId ||
        r.source != session)
      continue;
    SessionCommand cmd;
    cmd.target = r.target;
    cmd.action = CommandAction::ReplayEvent;
    cmd.objectId = r.object;
    cmd.event = m.event;
    send_session(ctx.out, r.target, SessionCommandMsg{cmd}, session);
  }
}

void Hub::on_navigation(Ctx &ctx, const NavigationCommand &m) {
  const auto &session = ctx.require_session();
  owned_object(ctx.user, m.object);
  if (!is_absolute_url(m.url))
    throw Error(Errc::SchemaViolation, "navigation url must be absolute");
  for (const auto &r : routes_) {
    if (r.kind != RouteKind::Navigation || r.object != m.object || r.source != session)
      continue;
    SessionCommand cmd;
    cmd.target = r.target;
    cmd.action = CommandAction::Navigate;
    cmd.objectId = r.object;
    cmd.url = m.url;
    send_session(ctx.out, r.target, SessionCommandMsg{cmd}, session);
  }
}

void Hub::on_mutation(Ctx &ctx, const ContentMutation &m) {
  const auto &session = ctx.require_session();
  const auto &mut = m.mutation;
  owned_object(ctx.user, mut.objectId);
  auto &last = lastOriginSeq_[{mut.objectId, session}];
  if (mut.originSeq <= last)
    throw Error(Errc::StaleMutation, "originSeq " + std::to_string(mut.originSeq) +
                                         " not above " + std::to_string(last));
  last = mut.originSeq;
  const bool mirrored = std::any_of(routes_.begin(), routes_.end(), [&](const Route &r) {
    return r.kind == RouteKind::Mirror && r.object == mut.objectId;
  });
  if (mirrored) {
    for (const auto &s : ledger_.online_sessions(mut.objectId, ctx.user)) {
      if (s == session)
        continue;
      SessionCommand cmd;
      cmd.target = s;
      cmd.action = CommandAction::ApplyMutation;
      cmd.objectId = mut.objectId;
      cmd.mutation = mut;
      send_session(ctx.out, s, SessionCommandMsg{cmd}, session);
    }
  }
  ctx.ack(*this);
}

void Hub::on_upload(Ctx &ctx, const UploadBehaviour &m) {
  ctx.require_session();
  BehaviourRecord rec = m.record;
  rec.repo.owner = ctx.user;
  if (rec.meta.id.empty() || rec.meta.displayName.empty())
    throw Error(Errc::InvalidDescriptor, "behaviour id and display name are required");
  try {
    validate_param_specs(rec.meta.params);
  } catch (const Error &e) {
    throw Error(Errc::InvalidDescriptor, e.what(), e.code());
  }
  if (!rec.meta.applicability.agnostic && rec.meta.applicability.stereotypes.empty())
    throw Error(Errc::InvalidDescriptor, "specific behaviour without stereotypes");
  if (registry_.lookup(rec.meta.id) || durable_.repo.contains(rec.meta.id))
    throw Error(Errc::DuplicateId, rec.meta.id.str());
  const auto id = rec.meta.id;
  durable_.repo.emplace(id, std::move(rec));
  persist();
  ctx.ack(*this, id.str());
}

void Hub::on_fetch(Ctx &ctx, const FetchBehaviour &m) {
  const auto &session = ctx.require_session();
  FetchBehaviour reply;
  if (m.behaviour) {
    auto it = durable_.repo.find(*m.behaviour);
    if (it == durable_.repo.end() || !behaviour_visible(ctx.user, it->second))
      throw Error(Errc::NotFound, m.behaviour->str());
    reply.behaviour = m.behaviour;
    reply.records.push_back(it->second);
  } else {
    for (const auto &[id, r] : durable_.repo) {
      if (!behaviour_visible(ctx.user, r))
        continue;
      auto listed = r;
      listed.blob.clear();
      reply.records.push_back(std::move(listed));
    }
  }
  send(ctx.out, ctx.conn, std::move(reply), session);
}

} // namespace pimhub
