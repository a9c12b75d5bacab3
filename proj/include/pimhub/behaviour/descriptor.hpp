#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "pimhub/behaviour/types.hpp"
#include "pimhub/core/presence.hpp"
#include "pimhub/wire/commands.hpp"

namespace pimhub {

enum class RouteKind { Redirect, Navigation, Mirror };

std::string_view to_string(RouteKind k) noexcept;

/// Standing subscription installed in the hub's routing table.
///   Redirect:   DomEvent on `object` from `source` -> ReplayEvent at `target`
///   Navigation: NavigationCommand from `source` -> Navigate at `target`
///   Mirror:     ContentMutation on `object` -> ApplyMutation at every other
///               session where it is Online (source/target unused)
struct Route {
  RouteKind kind = RouteKind::Redirect;
  UserId owner;
  ObjectId object;
  SessionId source;
  SessionId target;

  friend auto operator<=>(const Route &, const Route &) = default;
  friend bool operator==(const Route &, const Route &) = default;
};

struct Plan {
  std::vector<SessionCommand> commands;
  std::vector<Route> routes;

  friend bool operator==(const Plan &, const Plan &) = default;
};

/// Everything a planner may look at. Planners are pure over this snapshot.
struct PlanRequest {
  const Bindings &bindings;
  const PresenceLedger &ledger;
  const ObjectLookup &objects;
  UserId owner;
  std::optional<SessionId> origin;
};

using Planner = std::function<Plan(const PlanRequest &)>;

struct BehaviourDescriptor {
  BehaviourMeta meta;
  Planner planner;
  RepoMeta repo;

  const BehaviourId &id() const noexcept { return meta.id; }
};

} // namespace pimhub
