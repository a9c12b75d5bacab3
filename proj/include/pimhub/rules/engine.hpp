#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pimhub/behaviour/registry.hpp"
#include "pimhub/core/error.hpp"
#include "pimhub/rules/rule.hpp"

namespace pimhub {

/// A rule whose references have been checked and whose selectors have been
/// turned into indexed session variables.
class CompiledRule {
public:
  const Rule &rule() const noexcept { return rule_; }
  const RuleId &id() const noexcept { return rule_.ruleId; }
  /// Variable names in order of first appearance; anonymous selectors get
  /// generated names starting with '$'.
  const std::vector<std::string> &variables() const noexcept { return vars_; }
  const BehaviourDescriptor &descriptor(std::size_t action) const {
    return *descriptors_.at(action);
  }

private:
  friend CompiledRule compile_rule(Rule, const BehaviourRegistry &,
                                   const ObjectLookup &);
  friend struct RuleEvaluator;

  struct Domain { // unary restriction on one variable
    SelectorKind kind;
    std::string arg;
  };
  struct Link { // binary restriction: distinct sessions on one device
    std::size_t a;
    std::size_t b;
  };
  struct Presence { // object must be Online (or not) at the variable's session
    std::size_t var;
    ObjectId object;
    PresenceState state;
  };

  Rule rule_;
  std::vector<std::string> vars_;
  std::vector<std::vector<Domain>> domains_;
  std::vector<Link> links_;
  std::vector<Presence> presence_;
  std::vector<const BehaviourDescriptor *> descriptors_;
};

/// Throws Error(InvalidRule | UnknownObject | UnknownBehaviour | BindingError).
/// BindingError carries the underlying MissingParam/KindMismatch as cause.
CompiledRule compile_rule(Rule rule, const BehaviourRegistry &registry,
                          const ObjectLookup &objects);

struct ConditionResult {
  bool satisfied = false;
  /// (variable, session) for every variable, in variable order.
  std::vector<std::pair<std::string, SessionId>> witness;

  /// Named variables as SessionRef bindings.
  Bindings bindings() const;

  friend bool operator==(const ConditionResult &, const ConditionResult &) = default;
};

/// Searches assignments of the owner's live sessions to the rule's variables.
/// The witness is the lexicographically smallest satisfying tuple. Never
/// mutates the ledger.
ConditionResult evaluate_condition(const CompiledRule &rule,
                                   const PresenceLedger &ledger);

struct ActionOutcome {
  BehaviourId behaviour;
  Bindings bindings; // stored bindings with the witness merged over them
  std::optional<Plan> plan;
  std::optional<Error> error;
};

struct Invocation {
  RuleId rule;
  UserId owner;
  std::vector<std::pair<std::string, SessionId>> witness;
  std::vector<ActionOutcome> actions;
};

struct FiringEntry {
  bool lastValue = false;
  Bindings lastBindings;

  friend bool operator==(const FiringEntry &, const FiringEntry &) = default;
};

using FiringState = std::map<RuleId, FiringEntry>;

/// Re-evaluates `rules` after a state change already applied to `ledger`
/// and returns invocations for rules whose condition went false -> true.
/// Rules are visited in creation order; planner failures are captured per
/// action and do not stop later actions or rules.
std::vector<Invocation> on_state_change(std::span<const CompiledRule *const> rules,
                                        FiringState &firing,
                                        const PresenceLedger &ledger,
                                        const ObjectLookup &objects,
                                        const std::optional<SessionId> &origin = std::nullopt);

/// Plans every action of `rule` under `witness` (used for firing and by tests).
std::vector<ActionOutcome> plan_actions(const CompiledRule &rule,
                                        const ConditionResult &witness,
                                        const PresenceLedger &ledger,
                                        const ObjectLookup &objects,
                                        const std::optional<SessionId> &origin);

} // namespace pimhub
