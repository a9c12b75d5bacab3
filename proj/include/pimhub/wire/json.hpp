#pragma once

// JSON mappings for every type that crosses the wire or lands in the store.
// Field names here are the public protocol; docs/protocol.md mirrors them.

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "pimhub/behaviour/types.hpp"
#include "pimhub/core/model.hpp"
#include "pimhub/core/presence.hpp"
#include "pimhub/rules/rule.hpp"
#include "pimhub/wire/commands.hpp"

namespace pimhub {

using Json = nlohmann::json;

void to_json(Json &j, const DeviceInfo &v);
void from_json(const Json &j, DeviceInfo &v);
void to_json(Json &j, const Locator &v);
void from_json(const Json &j, Locator &v);
void to_json(Json &j, const UIObject &v);
void from_json(const Json &j, UIObject &v);
void to_json(Json &j, const PresenceRecord &v);
void from_json(const Json &j, PresenceRecord &v);
void to_json(Json &j, const SessionEntry &v);
void from_json(const Json &j, SessionEntry &v);

void to_json(Json &j, const ParameterSpec &v);
void from_json(const Json &j, ParameterSpec &v);
void to_json(Json &j, const BindingValue &v);
void from_json(const Json &j, BindingValue &v);
void to_json(Json &j, const Applicability &v);
void from_json(const Json &j, Applicability &v);
void to_json(Json &j, const RepoMeta &v);
void from_json(const Json &j, RepoMeta &v);
void to_json(Json &j, const BehaviourMeta &v);
void from_json(const Json &j, BehaviourMeta &v);
void to_json(Json &j, const BehaviourRecord &v);
void from_json(const Json &j, BehaviourRecord &v);

void to_json(Json &j, const SessionSelector &v);
void from_json(const Json &j, SessionSelector &v);
void to_json(Json &j, const Predicate &v);
void from_json(const Json &j, Predicate &v);
void to_json(Json &j, const RuleAction &v);
void from_json(const Json &j, RuleAction &v);
void to_json(Json &j, const Rule &v);
void from_json(const Json &j, Rule &v);

void to_json(Json &j, const DomEventDescriptor &v);
void from_json(const Json &j, DomEventDescriptor &v);
void to_json(Json &j, const ContentMutationDescriptor &v);
void from_json(const Json &j, ContentMutationDescriptor &v);
void to_json(Json &j, const SessionCommand &v);
void from_json(const Json &j, SessionCommand &v);

std::string base64_encode(std::string_view bytes);
/// Throws Error(SchemaViolation) on invalid input.
std::string base64_decode(std::string_view text);

} // namespace pimhub
