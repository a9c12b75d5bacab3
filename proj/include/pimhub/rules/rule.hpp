#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pimhub/behaviour/types.hpp"
#include "pimhub/core/ids.hpp"

namespace pimhub {

enum class SelectorKind {
  Exact,                   // arg = SessionId
  OnDevice,                // arg = DeviceId
  DeviceKind,              // arg = DeviceKind name
  AnySessionOfUser,        // arg unused
  SecondSessionSameDevice, // arg = name of another selector variable
};

inline constexpr std::array<std::string_view, 5> kSelectorKindNames{
    "Exact", "OnDevice", "DeviceKind", "AnySessionOfUser",
    "SecondSessionSameDevice"};

inline std::string_view to_string(SelectorKind k) noexcept {
  return kSelectorKindNames[static_cast<std::size_t>(k)];
}
inline std::optional<SelectorKind> parse_selector_kind(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kSelectorKindNames.size(); ++i)
    if (kSelectorKindNames[i] == s)
      return static_cast<SelectorKind>(i);
  return std::nullopt;
}

/// A session variable. Selectors that share `var` denote the same session;
/// an empty `var` is an anonymous variable of its own. Named variables are
/// reported in the witness and bound to the behaviour parameter of the same
/// name.
struct SessionSelector {
  std::string var;
  SelectorKind kind = SelectorKind::AnySessionOfUser;
  std::string arg;

  friend bool operator==(const SessionSelector &,
                         const SessionSelector &) = default;
};

enum class PredicateKind { ObjectOnlineIn, ObjectOfflineIn, SessionsSameDevice };

inline constexpr std::array<std::string_view, 3> kPredicateKindNames{
    "ObjectOnlineIn", "ObjectOfflineIn", "SessionsSameDevice"};

inline std::string_view to_string(PredicateKind k) noexcept {
  return kPredicateKindNames[static_cast<std::size_t>(k)];
}
inline std::optional<PredicateKind> parse_predicate_kind(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kPredicateKindNames.size(); ++i)
    if (kPredicateKindNames[i] == s)
      return static_cast<PredicateKind>(i);
  return std::nullopt;
}

/// ObjectOnlineIn/ObjectOfflineIn use `objectId` and `a`;
/// SessionsSameDevice uses `a` and `b` (two distinct sessions, one device).
struct Predicate {
  PredicateKind kind = PredicateKind::ObjectOnlineIn;
  std::optional<ObjectId> objectId;
  SessionSelector a;
  std::optional<SessionSelector> b;

  friend bool operator==(const Predicate &, const Predicate &) = default;
};

struct RuleAction {
  BehaviourId behaviour;
  Bindings bindings;

  friend bool operator==(const RuleAction &, const RuleAction &) = default;
};

struct Rule {
  RuleId ruleId;
  UserId owner;
  std::vector<Predicate> condition;
  std::vector<RuleAction> actions;
  bool enabled = true;
  std::uint64_t createdAt = 0;

  friend bool operator==(const Rule &, const Rule &) = default;
};

} // namespace pimhub
