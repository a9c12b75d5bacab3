#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pimhub/core/ids.hpp"
#include "pimhub/core/model.hpp"

namespace pimhub {

enum class ParamKind { SessionRef, DeviceRef, ObjectRef, Text, Enum };

inline constexpr std::array<std::string_view, 5> kParamKindNames{
    "SessionRef", "DeviceRef", "ObjectRef", "Text", "Enum"};

inline std::string_view to_string(ParamKind k) noexcept {
  return kParamKindNames[static_cast<std::size_t>(k)];
}

inline std::optional<ParamKind> parse_param_kind(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kParamKindNames.size(); ++i)
    if (kParamKindNames[i] == s)
      return static_cast<ParamKind>(i);
  return std::nullopt;
}

/// A parameter a behaviour asks the user for. `repeated` parameters take one
/// or more values (e.g. the object list of OpenIn).
struct ParameterSpec {
  std::string name;
  ParamKind kind = ParamKind::Text;
  bool required = true;
  bool repeated = false;
  std::vector<std::string> options; // Enum only

  friend bool operator==(const ParameterSpec &, const ParameterSpec &) = default;
};

struct BindingValue {
  ParamKind kind = ParamKind::Text;
  std::vector<std::string> values;

  const std::string &single() const { return values.front(); }

  friend bool operator==(const BindingValue &, const BindingValue &) = default;
};

using Bindings = std::map<std::string, BindingValue>;

inline BindingValue session_ref(const SessionId &s) {
  return {ParamKind::SessionRef, {s.str()}};
}
inline BindingValue device_ref(const DeviceId &d) {
  return {ParamKind::DeviceRef, {d.str()}};
}
inline BindingValue object_ref(const ObjectId &o) {
  return {ParamKind::ObjectRef, {o.str()}};
}
inline BindingValue text_value(std::string s) {
  return {ParamKind::Text, {std::move(s)}};
}
inline BindingValue enum_value(std::string s) {
  return {ParamKind::Enum, {std::move(s)}};
}

struct Applicability {
  bool agnostic = true;
  std::set<Stereotype> stereotypes;

  static Applicability any() { return {}; }
  static Applicability only(std::set<Stereotype> s) {
    return {false, std::move(s)};
  }
  bool applies_to(Stereotype s) const {
    return agnostic || stereotypes.contains(s);
  }

  friend bool operator==(const Applicability &, const Applicability &) = default;
};

struct RepoMeta {
  UserId owner;
  bool reviewsEnabled = false;
  bool bugTrackingEnabled = false;
  bool isPublic = false;

  friend bool operator==(const RepoMeta &, const RepoMeta &) = default;
};

/// The declarative half of a behaviour: what the PIM needs to list it and to
/// render its parameter form.
struct BehaviourMeta {
  BehaviourId id;
  std::string displayName;
  Applicability applicability;
  std::vector<ParameterSpec> params;

  friend bool operator==(const BehaviourMeta &, const BehaviourMeta &) = default;
};

/// Shared-repository entry. `blob` is the client-side script, stored and
/// served byte for byte; the hub never runs it.
struct BehaviourRecord {
  BehaviourMeta meta;
  RepoMeta repo;
  std::string blob;

  friend bool operator==(const BehaviourRecord &,
                         const BehaviourRecord &) = default;
};

} // namespace pimhub
