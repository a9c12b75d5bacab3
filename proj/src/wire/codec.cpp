#include "pimhub/wire/codec.hpp"

#include "pimhub/core/error.hpp"
#include "pimhub/core/url.hpp"

namespace pimhub::wire {
namespace {

[[noreturn]] void bad(const std::string &what) {
  throw Error(Errc::SchemaViolation, what);
}

void require(bool ok, const std::string &what) {
  if (!ok)
    bad(what);
}

template <typename T>
void put_opt(Json &j, const char *key, const std::optional<T> &v) {
  if (v)
    j[key] = *v;
}

std::optional<std::string> opt_string(const Json &j, const char *key) {
  if (!j.contains(key))
    return std::nullopt;
  return j.at(key).get<std::string>();
}

Json payload_json(const Payload &payload) {
  return std::visit(
      [](const auto &p) -> Json {
        using T = std::decay_t<decltype(p)>;
        Json j = Json::object();
        if constexpr (std::is_same_v<T, Hello>) {
          j = Json{{"user", p.user.str()},
                   {"password", p.password},
                   {"device", p.device},
                   {"register", p.registerUser}};
        } else if constexpr (std::is_same_v<T, Welcome>) {
          j = Json{{"session", p.session.str()},
                   {"token", p.token},
                   {"pim", Json{{"objects", p.pim.objects}, {"rules", p.pim.rules}}},
                   {"ledger", Json{{"sessions", p.ledger.sessions},
                                   {"records", p.ledger.records}}}};
        } else if constexpr (std::is_same_v<T, CollectObject>) {
          j = Json{{"name", p.name},
                   {"tags", p.tags},
                   {"stereotype", std::string(to_string(p.stereotype))},
                   {"locator", p.locator}};
        } else if constexpr (std::is_same_v<T, UpdateObject>) {
          j = Json{{"object", p.object}};
        } else if constexpr (std::is_same_v<T, DeleteObject>) {
          j = Json{{"objectId", p.object.str()}};
        } else if constexpr (std::is_same_v<T, DefineRule>) {
          j = Json{{"rule", p.rule}};
        } else if constexpr (std::is_same_v<T, DeleteRule>) {
          j = Json{{"ruleId", p.rule.str()}};
        } else if constexpr (std::is_same_v<T, PresenceUpdate>) {
          j = Json{{"records", p.records}, {"sessions", p.sessions}};
          put_opt(j, "url", p.url);
        } else if constexpr (std::is_same_v<T, InvokeBehaviour>) {
          j = Json{{"behaviourId", p.behaviour.str()}, {"bindings", p.bindings}};
        } else if constexpr (std::is_same_v<T, SessionCommandMsg>) {
          j = Json{{"command", p.command}};
        } else if constexpr (std::is_same_v<T, DomEvent>) {
          j = Json{{"event", p.event}};
        } else if constexpr (std::is_same_v<T, NavigationCommand>) {
          j = Json{{"objectId", p.object.str()}, {"url", p.url}};
        } else if constexpr (std::is_same_v<T, ContentMutation>) {
          j = Json{{"mutation", p.mutation}};
        } else if constexpr (std::is_same_v<T, UploadBehaviour>) {
          j = Json{{"record", p.record}};
        } else if constexpr (std::is_same_v<T, FetchBehaviour>) {
          j = Json{{"records", p.records}};
          if (p.behaviour)
            j["behaviourId"] = p.behaviour->str();
        } else if constexpr (std::is_same_v<T, Ack>) {
          j = Json{{"ackOf", p.ackOf}, {"acceptedSeq", p.acceptedSeq}};
          put_opt(j, "ref", p.ref);
        } else if constexpr (std::is_same_v<T, ErrorMsg>) {
          j = Json{{"code", p.code}, {"message", p.message}};
          put_opt(j, "cause", p.cause);
          put_opt(j, "ackOf", p.ackOf);
        }
        return j;
      },
      payload);
}

Payload payload_from(Kind kind, const Json &j) {
  switch (kind) {
  case Kind::Hello:
    return Hello{UserId(j.at("user").get<std::string>()),
                 j.at("password").get<std::string>(),
                 j.at("device").get<DeviceInfo>(),
                 j.at("register").get<bool>()};
  case Kind::Welcome: {
    Welcome w;
    w.session = SessionId(j.at("session").get<std::string>());
    w.token = j.at("token").get<std::string>();
    const auto &pim = j.at("pim");
    w.pim.objects = pim.at("objects").get<std::vector<UIObject>>();
    w.pim.rules = pim.at("rules").get<std::vector<Rule>>();
    const auto &ledger = j.at("ledger");
    w.ledger.sessions = ledger.at("sessions").get<std::vector<SessionEntry>>();
    w.ledger.records = ledger.at("records").get<std::vector<PresenceRecord>>();
    return w;
  }
  case Kind::CollectObject: {
    CollectObject c;
    c.name = j.at("name").get<std::string>();
    c.tags = j.at("tags").get<std::set<std::string>>();
    auto s = parse_stereotype(j.at("stereotype").get<std::string>());
    if (!s)
      bad("unknown stereotype");
    c.stereotype = *s;
    c.locator = j.at("locator").get<Locator>();
    return c;
  }
  case Kind::UpdateObject:
    return UpdateObject{j.at("object").get<UIObject>()};
  case Kind::DeleteObject:
    return DeleteObject{ObjectId(j.at("objectId").get<std::string>())};
  case Kind::DefineRule:
    return DefineRule{j.at("rule").get<Rule>()};
  case Kind::DeleteRule:
    return DeleteRule{RuleId(j.at("ruleId").get<std::string>())};
  case Kind::PresenceUpdate:
    return PresenceUpdate{opt_string(j, "url"),
                          j.at("records").get<std::vector<PresenceRecord>>(),
                          j.at("sessions").get<std::vector<SessionEntry>>()};
  case Kind::InvokeBehaviour:
    return InvokeBehaviour{BehaviourId(j.at("behaviourId").get<std::string>()),
                           j.at("bindings").get<Bindings>()};
  case Kind::SessionCommand:
    return SessionCommandMsg{j.at("command").get<SessionCommand>()};
  case Kind::DomEvent:
    return DomEvent{j.at("event").get<DomEventDescriptor>()};
  case Kind::NavigationCommand:
    return NavigationCommand{ObjectId(j.at("objectId").get<std::string>()),
                             j.at("url").get<std::string>()};
  case Kind::ContentMutation:
    return ContentMutation{j.at("mutation").get<ContentMutationDescriptor>()};
  case Kind::UploadBehaviour:
    return UploadBehaviour{j.at("record").get<BehaviourRecord>()};
  case Kind::FetchBehaviour: {
    FetchBehaviour f;
    if (auto id = opt_string(j, "behaviourId"))
      f.behaviour = BehaviourId(*id);
    f.records = j.at("records").get<std::vector<BehaviourRecord>>();
    return f;
  }
  case Kind::Ack:
    return Ack{j.at("ackOf").get<std::string>(),
               j.at("acceptedSeq").get<std::uint64_t>(), opt_string(j, "ref")};
  case Kind::Error:
    return ErrorMsg{j.at("code").get<std::string>(), opt_string(j, "cause"),
                    j.at("message").get<std::string>(), opt_string(j, "ackOf")};
  }
  bad("unhandled kind");
}

void validate_object(const UIObject &o) {
  require(!o.objectId.empty() && !o.owner.empty(), "UIObject ids empty");
}

void validate_rule_shape(const Rule &r) {
  require(!r.owner.empty(), "Rule.owner empty");
  for (const auto &p : r.condition) {
    const bool objectPred = p.kind != PredicateKind::SessionsSameDevice;
    require(objectPred == p.objectId.has_value(), "Predicate.objectId presence");
    require(objectPred != p.b.has_value(), "Predicate.b presence");
  }
  for (const auto &a : r.actions)
    require(!a.behaviour.empty(), "RuleAction.behaviour empty");
}

void validate_entry(const SessionEntry &e) {
  require(!e.sessionId.empty() && !e.user.empty() && !e.device.deviceId.empty(),
          "SessionEntry ids empty");
}

void validate_record(const PresenceRecord &r) {
  require(!r.objectId.empty() && !r.sessionId.empty(), "PresenceRecord ids empty");
}

} // namespace

std::optional<Kind> parse_kind(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == s)
      return static_cast<Kind>(i);
  return std::nullopt;
}

void validate(const WireMessage &msg) {
  require(!msg.msgId.empty(), "msgId empty");
  std::visit(
      [](const auto &p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Hello>) {
          require(!p.user.empty(), "Hello.user empty");
          require(!p.device.deviceId.empty(), "Hello.device.deviceId empty");
        } else if constexpr (std::is_same_v<T, Welcome>) {
          require(!p.session.empty(), "Welcome.session empty");
          for (const auto &o : p.pim.objects)
            validate_object(o);
          for (const auto &r : p.pim.rules)
            validate_rule_shape(r);
          for (const auto &e : p.ledger.sessions)
            validate_entry(e);
          for (const auto &r : p.ledger.records)
            validate_record(r);
        } else if constexpr (std::is_same_v<T, UpdateObject>) {
          validate_object(p.object);
        } else if constexpr (std::is_same_v<T, DeleteObject>) {
          require(!p.object.empty(), "DeleteObject.objectId empty");
        } else if constexpr (std::is_same_v<T, DefineRule>) {
          validate_rule_shape(p.rule);
        } else if constexpr (std::is_same_v<T, DeleteRule>) {
          require(!p.rule.empty(), "DeleteRule.ruleId empty");
        } else if constexpr (std::is_same_v<T, PresenceUpdate>) {
          require(!p.url || is_absolute_url(*p.url), "PresenceUpdate.url");
          for (const auto &r : p.records)
            validate_record(r);
          for (const auto &e : p.sessions)
            validate_entry(e);
        } else if constexpr (std::is_same_v<T, InvokeBehaviour>) {
          require(!p.behaviour.empty(), "InvokeBehaviour.behaviourId empty");
        } else if constexpr (std::is_same_v<T, SessionCommandMsg>) {
          pimhub::validate(p.command);
        } else if constexpr (std::is_same_v<T, DomEvent>) {
          pimhub::validate(p.event);
        } else if constexpr (std::is_same_v<T, NavigationCommand>) {
          require(!p.object.empty(), "NavigationCommand.objectId empty");
          require(is_absolute_url(p.url), "NavigationCommand.url");
        } else if constexpr (std::is_same_v<T, ContentMutation>) {
          pimhub::validate(p.mutation);
        } else if constexpr (std::is_same_v<T, UploadBehaviour>) {
          require(!p.record.meta.id.empty(), "UploadBehaviour.meta.id empty");
        } else if constexpr (std::is_same_v<T, Ack>) {
          require(!p.ackOf.empty(), "Ack.ackOf empty");
        } else if constexpr (std::is_same_v<T, ErrorMsg>) {
          require(!p.code.empty(), "Error.code empty");
        }
      },
      msg.payload);
}

Json to_json(const WireMessage &msg) {
  validate(msg);
  Json j{{"kind", std::string(to_string(msg.kind()))},
         {"msgId", msg.msgId},
         {"payload", payload_json(msg.payload)}};
  if (msg.serverSeq)
    j["serverSeq"] = *msg.serverSeq;
  return j;
}

WireMessage from_json(const Json &frame) {
  if (!frame.is_object())
    throw Error(Errc::MalformedFrame, "frame is not a JSON object");
  try {
    const auto kindName = frame.at("kind").get<std::string>();
    const auto kind = parse_kind(kindName);
    if (!kind)
      throw Error(Errc::UnknownKind, kindName);
    WireMessage msg;
    msg.msgId = frame.at("msgId").get<std::string>();
    if (frame.contains("serverSeq"))
      msg.serverSeq = frame.at("serverSeq").get<std::uint64_t>();
    const auto &payload = frame.at("payload");
    if (!payload.is_object())
      bad("payload is not an object");
    msg.payload = payload_from(*kind, payload);
    validate(msg);
    return msg;
  } catch (const nlohmann::json::exception &e) {
    throw Error(Errc::SchemaViolation, e.what());
  }
}

std::string encode(const WireMessage &msg) {
  const Json j = to_json(msg);
  try {
    return j.dump();
  } catch (const nlohmann::json::exception &e) {
    // invalid UTF-8 in a string field
    throw Error(Errc::SchemaViolation, e.what());
  }
}

WireMessage decode(std::string_view bytes) {
  if (bytes.size() > kMaxFrameBytes)
    throw Error(Errc::MalformedFrame, "frame exceeds 1 MiB");
  Json frame = Json::parse(bytes, nullptr, /*allow_exceptions=*/false);
  if (frame.is_discarded())
    throw Error(Errc::MalformedFrame, "not valid JSON");
  return from_json(frame);
}

std::pair<WireMessage, std::uint64_t> assign_server_seq(WireMessage msg,
                                                        std::uint64_t counter) {
  if (msg.serverSeq)
    throw Error(Errc::AlreadySequenced, msg.msgId);
  msg.serverSeq = counter;
  return {std::move(msg), counter + 1};
}

} // namespace pimhub::wire
