#include "properties.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

#include "generators.hpp"
#include "hub_driver.hpp"
#include "../oracles/ledger_oracle.hpp"
#include "../oracles/naive_interpreter.hpp"
#include "pimhub/behaviour/builtins.hpp"
#include "pimhub/core/error.hpp"
#include "pimhub/hub/store.hpp"
#include "pimhub/rules/engine.hpp"

namespace testsupport {

using namespace pimhub;

namespace {

const UserId kOwner{"u"};
const UserId kStranger{"v"};

SessionId sid(int n) { return SessionId("s" + std::to_string(n)); }

std::string describe(const std::vector<oracle::Fired> &v) {
  std::ostringstream os;
  os << '[';
  for (const auto &f : v) {
    os << ' ' << f.rule.str() << '{';
    for (const auto &[var, s] : f.witness)
      os << var << '=' << s.str() << ' ';
    os << '}';
  }
  os << " ]";
  return os.str();
}

// One randomly generated world for the rule properties.
struct World {
  BehaviourRegistry registry;
  std::map<ObjectId, UIObject> objects;
  ObjectLookup lookup;
  PresenceLedger ledger;
  std::vector<DeviceInfo> devices{{DeviceId("d1"), DeviceKind::Desktop, "laptop"},
                                  {DeviceId("d2"), DeviceKind::Mobile, "phone"},
                                  {DeviceId("d3"), DeviceKind::Desktop, "tower"}};
  std::map<SessionId, std::uint64_t> seq;
  int nextSession = 1;

  World() {
    registry.register_descriptor({{BehaviourId("Noop"), "noop", Applicability::any(), {}},
                                  [](const PlanRequest &) { return Plan{}; },
                                  {}});
    for (int i = 1; i <= 3; ++i) {
      UIObject o;
      o.objectId = ObjectId("o" + std::to_string(i));
      o.owner = kOwner;
      o.name = "object " + std::to_string(i);
      objects[o.objectId] = o;
    }
    lookup = [this](const ObjectId &id) -> const UIObject * {
      auto it = objects.find(id);
      return it == objects.end() ? nullptr : &it->second;
    };
    // a session of someone else, never eligible
    ledger.upsert_session({sid(9), kStranger, devices[0], "https://example.org/", true});
  }

  std::vector<SessionId> live(bool ownerOnly = true) const {
    std::vector<SessionId> out;
    for (const auto &[id, e] : ledger.directory())
      if (e.live && (!ownerOnly || e.user == kOwner))
        out.push_back(id);
    return out;
  }

  bool open_session(Rng &rng) {
    if (nextSession > 4)
      return false;
    ledger.upsert_session({sid(nextSession++), kOwner, devices[pick(rng, devices.size())],
                           "https://example.org/", true});
    return true;
  }
};

SessionSelector random_selector(Rng &rng) {
  static const std::vector<std::string> vars{"", "", "x", "y"};
  SessionSelector s;
  s.var = vars[pick(rng, vars.size())];
  const auto roll = pick(rng, 20);
  if (roll < 8) {
    s.kind = SelectorKind::AnySessionOfUser;
  } else if (roll < 11) {
    s.kind = SelectorKind::DeviceKind;
    s.arg = coin(rng) ? "Desktop" : "Mobile";
  } else if (roll < 14) {
    s.kind = SelectorKind::OnDevice;
    s.arg = "d" + std::to_string(1 + pick(rng, 3));
  } else if (roll < 16) {
    s.kind = SelectorKind::Exact;
    s.arg = sid(pick(rng, 3) == 0 ? 9 : static_cast<int>(1 + pick(rng, 4))).str();
  } else {
    s.kind = SelectorKind::SecondSessionSameDevice;
    s.arg = coin(rng) ? "x" : "y";
  }
  return s;
}

Rule random_rule(Rng &rng, int index) {
  Rule r;
  r.ruleId = RuleId("r" + std::to_string(index));
  r.owner = kOwner;
  for (auto n = 1 + pick(rng, 3); n > 0; --n) {
    Predicate p;
    const auto roll = pick(rng, 10);
    p.kind = roll < 6   ? PredicateKind::ObjectOnlineIn
             : roll < 8 ? PredicateKind::ObjectOfflineIn
                        : PredicateKind::SessionsSameDevice;
    p.a = random_selector(rng);
    if (p.kind == PredicateKind::SessionsSameDevice)
      p.b = random_selector(rng);
    else
      p.objectId = ObjectId("o" + std::to_string(1 + pick(rng, 3)));
    r.condition.push_back(p);
  }
  r.actions.push_back({BehaviourId("Noop"), {}});
  r.enabled = pick(rng, 10) != 0;
  r.createdAt = pick(rng, 5); // ties exercise the ruleId tie-break
  return r;
}

/// Rules that compile; generation retries until they do.
std::vector<Rule> random_rules(Rng &rng, World &w, std::map<RuleId, CompiledRule> &compiled) {
  std::vector<Rule> rules;
  const auto count = 1 + pick(rng, 3);
  for (int i = 1; rules.size() < count; ++i) {
    Rule r = random_rule(rng, i);
    try {
      compiled.insert_or_assign(r.ruleId, compile_rule(r, w.registry, w.lookup));
      rules.push_back(r);
    } catch (const Error &) {
    }
  }
  return rules;
}

std::vector<oracle::Fired> engine_step(const std::map<RuleId, CompiledRule> &compiled,
                                       FiringState &firing, const World &w) {
  std::vector<const CompiledRule *> ptrs;
  for (const auto &[id, c] : compiled)
    ptrs.push_back(&c);
  std::vector<oracle::Fired> out;
  for (auto &inv : on_state_change(ptrs, firing, w.ledger, w.lookup))
    out.push_back({inv.rule, inv.witness});
  return out;
}

// One random event against the world. Returns a short label for reports.
std::string random_event(Rng &rng, World &w, std::vector<PresenceRecord> &history) {
  const auto roll = pick(rng, 20);
  auto live = w.live();
  if (live.empty() || (roll < 3 && w.open_session(rng))) {
    if (live.empty() && !w.open_session(rng))
      return "idle";
    return "open";
  }
  if (roll < 5) {
    const SessionId s = live[pick(rng, live.size())];
    for (const auto &r : w.ledger.close_session(s))
      w.seq[r.sessionId] = std::max(w.seq[r.sessionId], r.seq);
    return "close " + s.str();
  }
  if (roll < 7 && !history.empty()) {
    w.ledger.apply(history[pick(rng, history.size())]);
    return "replay";
  }
  // stranger sessions get updates too; they must never matter
  const SessionId s = pick(rng, 8) == 0 ? sid(9) : live[pick(rng, live.size())];
  PresenceRecord r{ObjectId("o" + std::to_string(1 + pick(rng, 3))), s,
                   pick(rng, 3) ? PresenceState::Online : PresenceState::Offline,
                   std::max(w.seq[s], w.ledger.last_seq(s)) + 1};
  w.seq[s] = r.seq;
  w.ledger.apply(r);
  history.push_back(r);
  return "apply " + r.objectId.str() + "@" + s.str() + " " + std::string(to_string(r.state));
}

} // namespace

PropertyResult rule_engine_equivalence(std::uint64_t seed, std::size_t instances) {
  PropertyResult res;
  for (std::size_t n = 0; n < instances; ++n) {
    Rng rng(seed * 1000003u + n);
    World w;
    std::map<RuleId, CompiledRule> compiled;
    std::vector<Rule> rules = random_rules(rng, w, compiled);

    FiringState firing;
    oracle::NaiveInterpreter naive;
    std::vector<PresenceRecord> history;
    const auto events = 8 + pick(rng, 25);
    for (std::uint64_t e = 0; e < events; ++e) {
      std::string what;
      if (pick(rng, 25) == 0) {
        // flip a rule on or off
        Rule &r = rules[pick(rng, rules.size())];
        r.enabled = !r.enabled;
        compiled.insert_or_assign(r.ruleId, compile_rule(r, w.registry, w.lookup));
        what = "toggle " + r.ruleId.str();
      } else {
        what = random_event(rng, w, history);
      }
      auto got = engine_step(compiled, firing, w);
      auto want = naive.step(rules, w.ledger);
      ++res.checked;
      res.positives += want.size();
      if (got != want) {
        if (res.failures++ == 0)
          res.first = "instance " + std::to_string(n) + " event " + std::to_string(e) +
                      " (" + what + "): engine " + describe(got) + " oracle " +
                      describe(want);
        break;
      }
    }
  }
  return res;
}

PropertyResult condition_equivalence(std::uint64_t seed, std::size_t instances) {
  PropertyResult res;
  for (std::size_t n = 0; n < instances; ++n) {
    Rng rng(seed * 7919u + n);
    World w;
    for (auto k = 1 + pick(rng, 4); k > 0; --k)
      w.open_session(rng);
    std::vector<PresenceRecord> history;
    for (auto k = pick(rng, 14); k > 0; --k)
      random_event(rng, w, history);

    std::map<RuleId, CompiledRule> compiled;
    for (const Rule &r : random_rules(rng, w, compiled)) {
      Rule on = r;
      on.enabled = true;
      const auto got = evaluate_condition(compiled.at(r.ruleId), w.ledger);
      const auto want = oracle::brute_force(on, w.ledger);
      ++res.checked;
      res.positives += want.satisfied;
      if (got.satisfied != want.satisfied || got.witness != want.witness) {
        if (res.failures++ == 0)
          res.first = "instance " + std::to_string(n) + " rule " + r.ruleId.str() +
                      ": engine " + (got.satisfied ? "true" : "false") + " oracle " +
                      (want.satisfied ? "true" : "false");
      }
    }
  }
  return res;
}

PropertyResult ledger_permutations(std::uint64_t seed, std::size_t sets,
                                   std::size_t maxUpdates) {
  PropertyResult res;
  Rng rng(seed);
  for (std::size_t n = 0; n < sets; ++n) {
    PresenceLedger base;
    const DeviceInfo dev{DeviceId("d1"), DeviceKind::Desktop, ""};
    base.upsert_session({sid(1), kOwner, dev, "", true});
    base.upsert_session({sid(2), kOwner, dev, "", true});

    // seqs are unique per session, as a well-behaved client sends them
    std::map<SessionId, std::vector<std::uint64_t>> seqs;
    for (int s = 1; s <= 2; ++s) {
      std::vector<std::uint64_t> pool;
      for (std::uint64_t q = 1; q <= 20; ++q)
        pool.push_back(q);
      std::shuffle(pool.begin(), pool.end(), rng);
      seqs[sid(s)] = pool;
    }
    std::vector<PresenceRecord> updates;
    const auto size = 1 + pick(rng, maxUpdates);
    while (updates.size() < size) {
      if (!updates.empty() && pick(rng, 6) == 0) {
        updates.push_back(updates[pick(rng, updates.size())]); // exact duplicate
        continue;
      }
      const SessionId s = sid(1 + static_cast<int>(pick(rng, 2)));
      auto &pool = seqs[s];
      updates.push_back({ObjectId("o" + std::to_string(1 + pick(rng, 2))), s,
                         coin(rng) ? PresenceState::Online : PresenceState::Offline,
                         pool.back()});
      pool.pop_back();
    }
    ++res.checked;
    if (auto bad = oracle::permutation_mismatches(base, updates, rng); bad > 0) {
      if (res.failures++ == 0)
        res.first = "set " + std::to_string(n) + " of " + std::to_string(updates.size()) +
                    " updates: " + std::to_string(bad) + " orderings disagree";
    }
  }
  return res;
}

PropertyResult restart_durability(std::uint64_t seed, std::size_t mutations,
                                  const std::string &dir) {
  PropertyResult res;
  std::shared_ptr<PimStore> store;
  if (dir.empty()) {
    store = std::make_shared<MemoryStore>();
  } else {
    std::filesystem::create_directories(dir);
    std::filesystem::remove(dir + "/pim.json");
    std::filesystem::remove(dir + "/auth.json");
    store = std::make_shared<FileStore>(dir + "/pim.json", dir + "/auth.json");
  }
  HubDriver hub(store, HubOptions{seed});
  Rng rng(seed);

  const std::vector<std::pair<std::string, std::string>> users{{"ann", "laptop"},
                                                               {"bob", "phone"}};
  std::vector<ConnectionId> conns;
  for (const auto &[u, d] : users)
    conns.push_back(hub.login(u, d));

  const std::vector<std::string> patterns{"https://mail.google.com/*", "https://vimeo.com/*",
                                          "https://en.wikipedia.org/wiki/*"};
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < mutations; ++i) {
    const std::size_t who = pick(rng, conns.size());
    const ConnectionId c = conns[who];
    const UserId user(users[who].first);
    const auto pim = hub.hub().pim_for(user);
    const auto before = hub.inbox(c).size();

    switch (pim.objects.empty() ? 0 : pick(rng, 8)) {
    case 0:
    case 1:
      hub.send(c, wire::CollectObject{"obj " + random_text(rng, 4) + "x",
                                      {random_text(rng, 3)},
                                      static_cast<Stereotype>(pick(rng, 8)),
                                      {patterns[pick(rng, 3)], coin(rng) ? "/" : "/0/1"}});
      break;
    case 2: {
      UIObject o = pim.objects[pick(rng, pim.objects.size())];
      o.name = "renamed " + std::to_string(i);
      o.tags.insert("t" + std::to_string(pick(rng, 4)));
      if (coin(rng))
        o.enabledBehaviours.insert(builtin::kShowOnlyIn);
      else
        o.enabledBehaviours.clear();
      hub.send(c, wire::UpdateObject{o});
      break;
    }
    case 3:
      hub.send(c, wire::DeleteObject{pim.objects[pick(rng, pim.objects.size())].objectId});
      break;
    case 4:
    case 5: {
      Rule r;
      if (!pim.rules.empty() && coin(rng))
        r.ruleId = pim.rules[pick(rng, pim.rules.size())].ruleId;
      r.owner = user;
      const ObjectId obj = pim.objects[pick(rng, pim.objects.size())].objectId;
      Predicate p;
      p.kind = PredicateKind::ObjectOnlineIn;
      p.objectId = obj;
      p.a = {"target", SelectorKind::AnySessionOfUser, ""};
      r.condition.push_back(p);
      r.actions.push_back({builtin::kShowOnlyIn, {{"object", object_ref(obj)}}});
      r.enabled = pick(rng, 4) != 0;
      hub.send(c, wire::DefineRule{r});
      break;
    }
    case 6:
      if (!pim.rules.empty())
        hub.send(c, wire::DeleteRule{pim.rules[pick(rng, pim.rules.size())].ruleId});
      break;
    case 7: {
      BehaviourRecord rec;
      rec.meta.id = BehaviourId(user.str() + ".b" + std::to_string(i));
      rec.meta.displayName = "uploaded " + std::to_string(i);
      rec.repo.isPublic = coin(rng);
      rec.blob = "export default () => " + std::to_string(rng() % 1000) + ";";
      hub.send(c, wire::UploadBehaviour{rec});
      break;
    }
    }
    const auto &box = hub.inbox(c);
    for (auto k = before; k < box.size(); ++k)
      if (auto *a = box[k].as<wire::Ack>(); a && a->ackOf == hub.last_msg_id())
        ++accepted;
  }

  const DurableState before = hub.hub().durable();
  std::map<UserId, wire::PimSnapshot> views;
  for (const auto &[u, d] : users)
    views[UserId(u)] = hub.hub().pim_for(UserId(u));

  hub.restart(HubOptions{seed + 1});
  res.checked = mutations;
  if (accepted < mutations / 2) {
    res.failures = 1;
    res.first = "only " + std::to_string(accepted) + " of " + std::to_string(mutations) +
                " mutations were accepted";
    return res;
  }
  if (!(hub.hub().durable() == before)) {
    res.failures = 1;
    res.first = "restored durable state differs";
    return res;
  }
  for (const auto &[u, view] : views)
    if (!(hub.hub().pim_for(u) == view)) {
      res.failures = 1;
      res.first = "restored PIM of " + u.str() + " differs";
      return res;
    }
  // credentials survived too
  const auto c = hub.login(users[0].first, "desk");
  if (hub.received<wire::Welcome>(c).size() != 1) {
    res.failures = 1;
    res.first = "login after restart failed";
  }
  return res;
}

} // namespace testsupport
