#include "pimhub/rules/engine.hpp"

#include <algorithm>
#include <map>

namespace pimhub {

CompiledRule compile_rule(Rule rule, const BehaviourRegistry &registry,
                          const ObjectLookup &objects) {
  if (rule.condition.empty())
    throw Error(Errc::InvalidRule, "rule needs at least one condition");
  if (rule.actions.empty())
    throw Error(Errc::InvalidRule, "rule needs at least one action");

  CompiledRule out;
  std::map<std::string, std::size_t> index;
  auto variable = [&](const SessionSelector &sel, std::size_t pred,
                      char side) -> std::size_t {
    std::string name = sel.var.empty()
                           ? "$" + std::to_string(pred) + side
                           : sel.var;
    auto [it, inserted] = index.emplace(name, out.vars_.size());
    if (inserted) {
      out.vars_.push_back(name);
      out.domains_.emplace_back();
    }
    return it->second;
  };

  auto check_object = [&](const ObjectId &id) {
    const UIObject *o = objects ? objects(id) : nullptr;
    if (!o || o->owner != rule.owner)
      throw Error(Errc::UnknownObject, id.str());
  };

  // Second-session links are resolved after all variables are known.
  std::vector<std::pair<std::size_t, std::string>> pendingSecond;
  auto add_selector = [&](const SessionSelector &sel, std::size_t pred,
                          char side) -> std::size_t {
    const std::size_t v = variable(sel, pred, side);
    switch (sel.kind) {
    case SelectorKind::Exact:
    case SelectorKind::OnDevice:
      if (sel.arg.empty())
        throw Error(Errc::InvalidRule, std::string(to_string(sel.kind)) +
                                           " selector needs an argument");
      break;
    case SelectorKind::DeviceKind:
      if (!parse_device_kind(sel.arg))
        throw Error(Errc::InvalidRule, "unknown device kind '" + sel.arg + "'");
      break;
    case SelectorKind::AnySessionOfUser:
      break;
    case SelectorKind::SecondSessionSameDevice:
      pendingSecond.emplace_back(v, sel.arg);
      return v;
    }
    out.domains_[v].push_back({sel.kind, sel.arg});
    return v;
  };

  for (std::size_t i = 0; i < rule.condition.size(); ++i) {
    const auto &p = rule.condition[i];
    switch (p.kind) {
    case PredicateKind::ObjectOnlineIn:
    case PredicateKind::ObjectOfflineIn: {
      if (!p.objectId)
        throw Error(Errc::InvalidRule, "object predicate without object");
      check_object(*p.objectId);
      const auto v = add_selector(p.a, i, 'a');
      out.presence_.push_back({v, *p.objectId,
                               p.kind == PredicateKind::ObjectOnlineIn
                                   ? PresenceState::Online
                                   : PresenceState::Offline});
      break;
    }
    case PredicateKind::SessionsSameDevice: {
      if (!p.b)
        throw Error(Errc::InvalidRule, "SessionsSameDevice needs two selectors");
      const auto a = add_selector(p.a, i, 'a');
      const auto b = add_selector(*p.b, i, 'b');
      if (a == b)
        throw Error(Errc::InvalidRule, "SessionsSameDevice on a single variable");
      out.links_.push_back({a, b});
      break;
    }
    }
  }
  for (const auto &[v, rel] : pendingSecond) {
    auto it = index.find(rel);
    if (it == index.end() || it->second == v)
      throw Error(Errc::InvalidRule, "second-session selector relative to '" +
                                         rel + "'");
    out.links_.push_back({v, it->second});
  }

  for (const auto &action : rule.actions) {
    const auto *d = registry.lookup(action.behaviour);
    if (!d)
      throw Error(Errc::UnknownBehaviour, action.behaviour.str());
    Bindings probe = action.bindings;
    for (const auto &name : out.vars_)
      if (name.front() != '$')
        probe[name] = BindingValue{ParamKind::SessionRef, {"?"}};
    try {
      validate_bindings(d->meta, probe);
    } catch (const Error &e) {
      throw Error(Errc::BindingError, e.what(), e.code());
    }
    for (const auto &[name, value] : action.bindings)
      if (value.kind == ParamKind::ObjectRef)
        for (const auto &id : value.values)
          check_object(ObjectId(id));
    out.descriptors_.push_back(d);
  }
  out.rule_ = std::move(rule);
  return out;
}

struct RuleEvaluator {
  const CompiledRule &rule;
  const PresenceLedger &ledger;
  std::vector<const SessionEntry *> sessions;
  std::vector<std::size_t> assignment;

  bool in_domain(std::size_t v, const SessionEntry &s) const {
    for (const auto &d : rule.domains_[v]) {
      switch (d.kind) {
      case SelectorKind::Exact:
        if (s.sessionId.str() != d.arg)
          return false;
        break;
      case SelectorKind::OnDevice:
        if (s.device.deviceId.str() != d.arg)
          return false;
        break;
      case SelectorKind::DeviceKind:
        if (to_string(s.device.kind) != d.arg)
          return false;
        break;
      default:
        break;
      }
    }
    for (const auto &p : rule.presence_)
      if (p.var == v && ledger.state(p.object, s.sessionId) != p.state)
        return false;
    return true;
  }

  bool links_hold(std::size_t upto) const {
    for (const auto &l : rule.links_) {
      if (std::max(l.a, l.b) != upto)
        continue;
      const auto *a = sessions[assignment[l.a]];
      const auto *b = sessions[assignment[l.b]];
      if (a == b || a->device.deviceId != b->device.deviceId)
        return false;
    }
    return true;
  }

  bool search(std::size_t v) {
    if (v == rule.vars_.size())
      return true;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      if (!in_domain(v, *sessions[i]))
        continue;
      assignment[v] = i;
      if (links_hold(v) && search(v + 1))
        return true;
    }
    return false;
  }
};

ConditionResult evaluate_condition(const CompiledRule &rule,
                                   const PresenceLedger &ledger) {
  RuleEvaluator eval{rule, ledger, {}, {}};
  for (const auto &id : ledger.live_sessions(rule.rule().owner))
    eval.sessions.push_back(ledger.session(id));
  eval.assignment.assign(rule.variables().size(), 0);

  ConditionResult result;
  if (!eval.search(0))
    return result;
  result.satisfied = true;
  for (std::size_t v = 0; v < rule.variables().size(); ++v)
    result.witness.emplace_back(rule.variables()[v],
                                eval.sessions[eval.assignment[v]]->sessionId);
  return result;
}

Bindings ConditionResult::bindings() const {
  Bindings out;
  for (const auto &[name, session] : witness)
    if (!name.empty() && name.front() != '$')
      out[name] = session_ref(session);
  return out;
}

std::vector<ActionOutcome> plan_actions(const CompiledRule &rule,
                                        const ConditionResult &witness,
                                        const PresenceLedger &ledger,
                                        const ObjectLookup &objects,
                                        const std::optional<SessionId> &origin) {
  std::vector<ActionOutcome> outcomes;
  const Bindings witnessed = witness.bindings();
  for (std::size_t i = 0; i < rule.rule().actions.size(); ++i) {
    const auto &action = rule.rule().actions[i];
    const auto &d = rule.descriptor(i);
    ActionOutcome outcome{action.behaviour, action.bindings, std::nullopt,
                          std::nullopt};
    for (const auto &spec : d.meta.params) {
      auto it = witnessed.find(spec.name);
      if (it != witnessed.end())
        outcome.bindings[spec.name] = it->second;
    }
    try {
      validate_bindings(d.meta, outcome.bindings);
      if (!d.planner)
        throw Error(Errc::PlannerError, "behaviour has no hub-side planner");
      PlanRequest req{outcome.bindings, ledger, objects, rule.rule().owner, origin};
      outcome.plan = d.planner(req);
    } catch (const Error &e) {
      if (e.code() == Errc::MissingParam || e.code() == Errc::KindMismatch)
        outcome.error = Error(Errc::BindingError, e.what(), e.code());
      else if (e.code() == Errc::PlannerError)
        outcome.error = e;
      else
        outcome.error = Error(Errc::PlannerError, e.what(), e.code());
    }
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

std::vector<Invocation> on_state_change(std::span<const CompiledRule *const> rules,
                                        FiringState &firing,
                                        const PresenceLedger &ledger,
                                        const ObjectLookup &objects,
                                        const std::optional<SessionId> &origin) {
  std::vector<const CompiledRule *> ordered(rules.begin(), rules.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](auto *a, auto *b) {
    return std::tie(a->rule().createdAt, a->rule().ruleId) <
           std::tie(b->rule().createdAt, b->rule().ruleId);
  });

  std::vector<Invocation> out;
  for (const auto *rule : ordered) {
    auto &entry = firing[rule->id()];
    if (!rule->rule().enabled) {
      entry = FiringEntry{};
      continue;
    }
    auto result = evaluate_condition(*rule, ledger);
    const bool rising = result.satisfied && !entry.lastValue;
    entry.lastValue = result.satisfied;
    entry.lastBindings = result.bindings();
    if (!rising)
      continue;
    Invocation inv{rule->id(), rule->rule().owner, result.witness, {}};
    inv.actions = plan_actions(*rule, result, ledger, objects, origin);
    out.push_back(std::move(inv));
  }
  return out;
}

} // namespace pimhub
