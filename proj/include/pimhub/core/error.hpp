#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pimhub {

enum class Errc {
  MalformedLocator,
  EmptyName,
  UnknownSession,
  UnknownObject,
  UnknownBehaviour,
  StereotypeMismatch,
  MalformedFrame,
  UnknownKind,
  SchemaViolation,
  AlreadySequenced,
  DuplicateId,
  InvalidParamSpec,
  MissingParam,
  KindMismatch,
  SameSession,
  ObjectOffline,
  NoLiveSession,
  MixedOrigins,
  EmptyObjectList,
  BindingError,
  InvalidRule,
  AuthFailed,
  SpoofedSession,
  NotOwner,
  PlannerError,
  TargetGone,
  RouteClosed,
  CorruptStore,
  InvalidDescriptor,
  ObjectInUse,
  NotFound,
  UnexpectedMessage,
  StaleMutation,
  ScenarioError,
};

std::string_view to_string(Errc code) noexcept;
std::optional<Errc> parse_errc(std::string_view name) noexcept;

/// The one exception type thrown across the library. `cause` carries the
/// underlying code when an error is wrapped, e.g. PlannerError(UnknownSession).
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string &message,
        std::optional<Errc> cause = std::nullopt);

  Errc code() const noexcept { return code_; }
  std::optional<Errc> cause() const noexcept { return cause_; }

private:
  Errc code_;
  std::optional<Errc> cause_;
};

} // namespace pimhub
