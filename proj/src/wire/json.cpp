#include "pimhub/wire/json.hpp"

#include <array>

#include "pimhub/core/error.hpp"

namespace pimhub {
namespace {

[[noreturn]] void bad(const std::string &what) {
  throw Error(Errc::SchemaViolation, what);
}

template <typename IdT>
IdT get_id(const Json &j, const char *key) {
  return IdT(j.at(key).get<std::string>());
}

template <typename IdT>
std::vector<std::string> id_strings(const std::set<IdT> &ids) {
  std::vector<std::string> out;
  for (const auto &id : ids)
    out.push_back(id.str());
  return out;
}

template <typename T, typename Parse>
T get_enum(const Json &j, const char *key, Parse parse) {
  const auto text = j.at(key).get<std::string>();
  auto value = parse(text);
  if (!value)
    bad(std::string(key) + ": unknown value '" + text + "'");
  return *value;
}

template <typename T>
void put_opt(Json &j, const char *key, const std::optional<T> &v) {
  if (v)
    j[key] = *v;
}

std::optional<std::string> get_opt_string(const Json &j, const char *key) {
  if (!j.contains(key))
    return std::nullopt;
  return j.at(key).get<std::string>();
}

constexpr std::string_view kB64 =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

} // namespace

void to_json(Json &j, const DeviceInfo &v) {
  j = Json{{"deviceId", v.deviceId.str()},
           {"kind", std::string(to_string(v.kind))},
           {"label", v.label}};
}
void from_json(const Json &j, DeviceInfo &v) {
  v.deviceId = get_id<DeviceId>(j, "deviceId");
  v.kind = get_enum<DeviceKind>(j, "kind", parse_device_kind);
  v.label = j.at("label").get<std::string>();
}

void to_json(Json &j, const Locator &v) {
  j = Json{{"urlPattern", v.urlPattern}, {"elementPath", v.elementPath}};
}
void from_json(const Json &j, Locator &v) {
  v.urlPattern = j.at("urlPattern").get<std::string>();
  v.elementPath = j.at("elementPath").get<std::string>();
}

void to_json(Json &j, const UIObject &v) {
  j = Json{{"objectId", v.objectId.str()},
           {"owner", v.owner.str()},
           {"name", v.name},
           {"tags", v.tags},
           {"stereotype", std::string(to_string(v.stereotype))},
           {"locator", v.locator},
           {"enabledBehaviours", id_strings(v.enabledBehaviours)},
           {"createdAt", v.createdAt}};
}
void from_json(const Json &j, UIObject &v) {
  v.objectId = get_id<ObjectId>(j, "objectId");
  v.owner = get_id<UserId>(j, "owner");
  v.name = j.at("name").get<std::string>();
  v.tags = j.at("tags").get<std::set<std::string>>();
  v.stereotype = get_enum<Stereotype>(j, "stereotype", parse_stereotype);
  v.locator = j.at("locator").get<Locator>();
  v.enabledBehaviours.clear();
  for (const auto &b : j.at("enabledBehaviours"))
    v.enabledBehaviours.insert(BehaviourId(b.get<std::string>()));
  v.createdAt = j.at("createdAt").get<std::uint64_t>();
}

void to_json(Json &j, const PresenceRecord &v) {
  j = Json{{"objectId", v.objectId.str()},
           {"sessionId", v.sessionId.str()},
           {"state", std::string(to_string(v.state))},
           {"seq", v.seq}};
}
void from_json(const Json &j, PresenceRecord &v) {
  v.objectId = get_id<ObjectId>(j, "objectId");
  v.sessionId = get_id<SessionId>(j, "sessionId");
  v.state = get_enum<PresenceState>(j, "state", parse_presence_state);
  v.seq = j.at("seq").get<std::uint64_t>();
}

void to_json(Json &j, const SessionEntry &v) {
  j = Json{{"sessionId", v.sessionId.str()},
           {"user", v.user.str()},
           {"device", v.device},
           {"currentUrl", v.currentUrl},
           {"live", v.live}};
}
void from_json(const Json &j, SessionEntry &v) {
  v.sessionId = get_id<SessionId>(j, "sessionId");
  v.user = get_id<UserId>(j, "user");
  v.device = j.at("device").get<DeviceInfo>();
  v.currentUrl = j.at("currentUrl").get<std::string>();
  v.live = j.at("live").get<bool>();
}

void to_json(Json &j, const ParameterSpec &v) {
  j = Json{{"name", v.name},
           {"kind", std::string(to_string(v.kind))},
           {"required", v.required},
           {"repeated", v.repeated},
           {"options", v.options}};
}
void from_json(const Json &j, ParameterSpec &v) {
  v.name = j.at("name").get<std::string>();
  v.kind = get_enum<ParamKind>(j, "kind", parse_param_kind);
  v.required = j.at("required").get<bool>();
  v.repeated = j.at("repeated").get<bool>();
  v.options = j.at("options").get<std::vector<std::string>>();
}

void to_json(Json &j, const BindingValue &v) {
  j = Json{{"kind", std::string(to_string(v.kind))}, {"values", v.values}};
}
void from_json(const Json &j, BindingValue &v) {
  v.kind = get_enum<ParamKind>(j, "kind", parse_param_kind);
  v.values = j.at("values").get<std::vector<std::string>>();
  if (v.values.empty())
    bad("binding without values");
}

void to_json(Json &j, const Applicability &v) {
  std::vector<std::string> names;
  for (auto s : v.stereotypes)
    names.emplace_back(to_string(s));
  j = Json{{"agnostic", v.agnostic}, {"stereotypes", names}};
}
void from_json(const Json &j, Applicability &v) {
  v.agnostic = j.at("agnostic").get<bool>();
  v.stereotypes.clear();
  for (const auto &s : j.at("stereotypes")) {
    auto parsed = parse_stereotype(s.get<std::string>());
    if (!parsed)
      bad("unknown stereotype");
    v.stereotypes.insert(*parsed);
  }
}

void to_json(Json &j, const RepoMeta &v) {
  j = Json{{"owner", v.owner.str()},
           {"reviewsEnabled", v.reviewsEnabled},
           {"bugTrackingEnabled", v.bugTrackingEnabled},
           {"public", v.isPublic}};
}
void from_json(const Json &j, RepoMeta &v) {
  v.owner = get_id<UserId>(j, "owner");
  v.reviewsEnabled = j.at("reviewsEnabled").get<bool>();
  v.bugTrackingEnabled = j.at("bugTrackingEnabled").get<bool>();
  v.isPublic = j.at("public").get<bool>();
}

void to_json(Json &j, const BehaviourMeta &v) {
  j = Json{{"id", v.id.str()},
           {"displayName", v.displayName},
           {"applicability", v.applicability},
           {"params", v.params}};
}
void from_json(const Json &j, BehaviourMeta &v) {
  v.id = get_id<BehaviourId>(j, "id");
  v.displayName = j.at("displayName").get<std::string>();
  v.applicability = j.at("applicability").get<Applicability>();
  v.params = j.at("params").get<std::vector<ParameterSpec>>();
}

void to_json(Json &j, const BehaviourRecord &v) {
  j = Json{{"meta", v.meta}, {"repo", v.repo}, {"blob", base64_encode(v.blob)}};
}
void from_json(const Json &j, BehaviourRecord &v) {
  v.meta = j.at("meta").get<BehaviourMeta>();
  v.repo = j.at("repo").get<RepoMeta>();
  v.blob = base64_decode(j.at("blob").get<std::string>());
}

void to_json(Json &j, const SessionSelector &v) {
  j = Json{{"var", v.var},
           {"kind", std::string(to_string(v.kind))},
           {"arg", v.arg}};
}
void from_json(const Json &j, SessionSelector &v) {
  v.var = j.at("var").get<std::string>();
  v.kind = get_enum<SelectorKind>(j, "kind", parse_selector_kind);
  v.arg = j.at("arg").get<std::string>();
}

void to_json(Json &j, const Predicate &v) {
  j = Json{{"kind", std::string(to_string(v.kind))}, {"a", v.a}};
  if (v.objectId)
    j["objectId"] = v.objectId->str();
  put_opt(j, "b", v.b);
}
void from_json(const Json &j, Predicate &v) {
  v.kind = get_enum<PredicateKind>(j, "kind", parse_predicate_kind);
  v.a = j.at("a").get<SessionSelector>();
  v.objectId.reset();
  v.b.reset();
  if (auto o = get_opt_string(j, "objectId"))
    v.objectId = ObjectId(*o);
  if (j.contains("b"))
    v.b = j.at("b").get<SessionSelector>();
}

void to_json(Json &j, const RuleAction &v) {
  j = Json{{"behaviour", v.behaviour.str()}, {"bindings", v.bindings}};
}
void from_json(const Json &j, RuleAction &v) {
  v.behaviour = get_id<BehaviourId>(j, "behaviour");
  v.bindings = j.at("bindings").get<Bindings>();
}

void to_json(Json &j, const Rule &v) {
  j = Json{{"ruleId", v.ruleId.str()},     {"owner", v.owner.str()},
           {"condition", v.condition},     {"actions", v.actions},
           {"enabled", v.enabled},         {"createdAt", v.createdAt}};
}
void from_json(const Json &j, Rule &v) {
  v.ruleId = get_id<RuleId>(j, "ruleId");
  v.owner = get_id<UserId>(j, "owner");
  v.condition = j.at("condition").get<std::vector<Predicate>>();
  v.actions = j.at("actions").get<std::vector<RuleAction>>();
  v.enabled = j.at("enabled").get<bool>();
  v.createdAt = j.at("createdAt").get<std::uint64_t>();
}

void to_json(Json &j, const DomEventDescriptor &v) {
  j = Json{{"objectId", v.objectId.str()},
           {"eventType", v.eventType},
           {"relativeTargetPath", v.relativeTargetPath}};
  put_opt(j, "payload", v.payload);
}
void from_json(const Json &j, DomEventDescriptor &v) {
  v.objectId = get_id<ObjectId>(j, "objectId");
  v.eventType = j.at("eventType").get<std::string>();
  v.relativeTargetPath = j.at("relativeTargetPath").get<std::string>();
  v.payload = get_opt_string(j, "payload");
}

void to_json(Json &j, const ContentMutationDescriptor &v) {
  j = Json{{"objectId", v.objectId.str()},
           {"relativeTargetPath", v.relativeTargetPath},
           {"originSeq", v.originSeq}};
  put_opt(j, "newText", v.newText);
  put_opt(j, "attribute", v.attribute);
  put_opt(j, "attributeValue", v.attributeValue);
}
void from_json(const Json &j, ContentMutationDescriptor &v) {
  v.objectId = get_id<ObjectId>(j, "objectId");
  v.relativeTargetPath = j.at("relativeTargetPath").get<std::string>();
  v.originSeq = j.at("originSeq").get<std::uint64_t>();
  v.newText = get_opt_string(j, "newText");
  v.attribute = get_opt_string(j, "attribute");
  v.attributeValue = get_opt_string(j, "attributeValue");
}

void to_json(Json &j, const SessionCommand &v) {
  j = Json{{"target", v.target.str()},
           {"action", std::string(to_string(v.action))}};
  if (v.objectId)
    j["objectId"] = v.objectId->str();
  put_opt(j, "url", v.url);
  if (!v.objects.empty()) {
    Json list = Json::array();
    for (const auto &o : v.objects)
      list.push_back(o.str());
    j["objects"] = std::move(list);
  }
  put_opt(j, "event", v.event);
  put_opt(j, "mutation", v.mutation);
  if (v.effect)
    j["effect"] = std::string(to_string(*v.effect));
  if (v.media)
    j["media"] = std::string(to_string(*v.media));
  if (v.stream)
    j["stream"] = std::string(to_string(*v.stream));
}
void from_json(const Json &j, SessionCommand &v) {
  v = SessionCommand{};
  v.target = get_id<SessionId>(j, "target");
  v.action = get_enum<CommandAction>(j, "action", parse_command_action);
  if (auto o = get_opt_string(j, "objectId"))
    v.objectId = ObjectId(*o);
  v.url = get_opt_string(j, "url");
  if (j.contains("objects"))
    for (const auto &o : j.at("objects"))
      v.objects.emplace_back(o.get<std::string>());
  if (j.contains("event"))
    v.event = j.at("event").get<DomEventDescriptor>();
  if (j.contains("mutation"))
    v.mutation = j.at("mutation").get<ContentMutationDescriptor>();
  if (j.contains("effect"))
    v.effect = get_enum<Effect>(j, "effect", parse_effect);
  if (j.contains("media"))
    v.media = get_enum<MediaVerb>(j, "media", parse_media_verb);
  if (j.contains("stream"))
    v.stream = get_enum<CaptureStream>(j, "stream", parse_capture_stream);
}

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned n = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
    out += kB64[(n >> 18) & 63];
    out += kB64[(n >> 12) & 63];
    out += kB64[(n >> 6) & 63];
    out += kB64[n & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    unsigned n = static_cast<unsigned char>(bytes[i]) << 16;
    if (rest == 2)
      n |= static_cast<unsigned char>(bytes[i + 1]) << 8;
    out += kB64[(n >> 18) & 63];
    out += kB64[(n >> 12) & 63];
    out += rest == 2 ? kB64[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0)
    bad("base64 length");
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    unsigned n = 0;
    int pad = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      unsigned v = 0;
      if (c == '=') {
        if (i + 4 != text.size() || k < 2)
          bad("base64 padding");
        ++pad;
      } else {
        if (pad > 0)
          bad("base64 padding");
        const auto pos = kB64.find(c);
        if (pos == std::string_view::npos)
          bad("base64 alphabet");
        v = static_cast<unsigned>(pos);
      }
      n = (n << 6) | v;
    }
    out += static_cast<char>((n >> 16) & 0xff);
    if (pad < 2)
      out += static_cast<char>((n >> 8) & 0xff);
    if (pad < 1)
      out += static_cast<char>(n & 0xff);
  }
  return out;
}

} // namespace pimhub
