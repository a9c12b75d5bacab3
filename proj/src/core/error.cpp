#include "pimhub/core/error.hpp"

#include <array>
#include <utility>

namespace pimhub {
namespace {

constexpr std::array<std::pair<Errc, std::string_view>, 34> kNames{{
    {Errc::MalformedLocator, "MalformedLocator"},
    {Errc::EmptyName, "EmptyName"},
    {Errc::UnknownSession, "UnknownSession"},
    {Errc::UnknownObject, "UnknownObject"},
    {Errc::UnknownBehaviour, "UnknownBehaviour"},
    {Errc::StereotypeMismatch, "StereotypeMismatch"},
    {Errc::MalformedFrame, "MalformedFrame"},
    {Errc::UnknownKind, "UnknownKind"},
    {Errc::SchemaViolation, "SchemaViolation"},
    {Errc::AlreadySequenced, "AlreadySequenced"},
    {Errc::DuplicateId, "DuplicateId"},
    {Errc::InvalidParamSpec, "InvalidParamSpec"},
    {Errc::MissingParam, "MissingParam"},
    {Errc::KindMismatch, "KindMismatch"},
    {Errc::SameSession, "SameSession"},
    {Errc::ObjectOffline, "ObjectOffline"},
    {Errc::NoLiveSession, "NoLiveSession"},
    {Errc::MixedOrigins, "MixedOrigins"},
    {Errc::EmptyObjectList, "EmptyObjectList"},
    {Errc::BindingError, "BindingError"},
    {Errc::InvalidRule, "InvalidRule"},
    {Errc::AuthFailed, "AuthFailed"},
    {Errc::SpoofedSession, "SpoofedSession"},
    {Errc::NotOwner, "NotOwner"},
    {Errc::PlannerError, "PlannerError"},
    {Errc::TargetGone, "TargetGone"},
    {Errc::RouteClosed, "RouteClosed"},
    {Errc::CorruptStore, "CorruptStore"},
    {Errc::InvalidDescriptor, "InvalidDescriptor"},
    {Errc::ObjectInUse, "ObjectInUse"},
    {Errc::NotFound, "NotFound"},
    {Errc::UnexpectedMessage, "UnexpectedMessage"},
    {Errc::StaleMutation, "StaleMutation"},
    {Errc::ScenarioError, "ScenarioError"},
}};

std::string compose(Errc code, const std::string &message,
                    std::optional<Errc> cause) {
  std::string out(to_string(code));
  if (cause) {
    out += "(";
    out += to_string(*cause);
    out += ")";
  }
  if (!message.empty()) {
    out += ": ";
    out += message;
  }
  return out;
}

} // namespace

std::string_view to_string(Errc code) noexcept {
  for (const auto &[c, name] : kNames)
    if (c == code)
      return name;
  return "Unknown";
}

std::optional<Errc> parse_errc(std::string_view name) noexcept {
  for (const auto &[c, n] : kNames)
    if (n == name)
      return c;
  return std::nullopt;
}

Error::Error(Errc code, const std::string &message, std::optional<Errc> cause)
    : std::runtime_error(compose(code, message, cause)), code_(code),
      cause_(cause) {}

} // namespace pimhub
