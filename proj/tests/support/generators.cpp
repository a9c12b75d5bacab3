#include "generators.hpp"

#include <vector>

#include "pimhub/behaviour/types.hpp"

namespace testsupport {

using namespace pimhub;
using namespace pimhub::wire;

namespace {

const std::vector<std::string> kUrls{
    "https://mail.google.com/mail/u/0/#inbox", "https://vimeo.com/76979871",
    "https://en.wikipedia.org/wiki/Toulouse", "http://localhost:8080/a?b=c"};
const std::vector<std::string> kPaths{"/", "/0", "/1/2", "#main", "#main/0/3"};

template <typename T>
const T &one_of(Rng &rng, const std::vector<T> &v) {
  return v[pick(rng, v.size())];
}

std::string nonempty(Rng &rng) {
  auto s = random_text(rng);
  return s.empty() ? "x" : s;
}

DeviceInfo random_device(Rng &rng) {
  return {DeviceId("d" + std::to_string(pick(rng, 5))),
          static_cast<DeviceKind>(pick(rng, 4)), random_text(rng)};
}

SessionSelector random_selector(Rng &rng) {
  SessionSelector s;
  s.var = coin(rng) ? "" : one_of(rng, std::vector<std::string>{"x", "y", "controller"});
  s.kind = static_cast<SelectorKind>(pick(rng, 5));
  s.arg = random_text(rng, 6);
  return s;
}

BindingValue random_binding(Rng &rng) {
  BindingValue b;
  b.kind = static_cast<ParamKind>(pick(rng, 5));
  const auto n = 1 + pick(rng, 3);
  for (std::uint64_t i = 0; i < n; ++i)
    b.values.push_back(random_text(rng));
  return b;
}

PresenceRecord random_record(Rng &rng) {
  return {ObjectId("o" + std::to_string(pick(rng, 100))),
          SessionId("s" + std::to_string(pick(rng, 100))),
          coin(rng) ? PresenceState::Online : PresenceState::Offline, rng() >> 12};
}

SessionEntry random_entry(Rng &rng) {
  return {SessionId("s" + std::to_string(pick(rng, 100))),
          UserId(nonempty(rng)), random_device(rng), one_of(rng, kUrls), coin(rng)};
}

BehaviourRecord random_behaviour_record(Rng &rng) {
  BehaviourRecord r;
  r.meta.id = BehaviourId(nonempty(rng));
  r.meta.displayName = random_text(rng);
  if (coin(rng))
    r.meta.applicability =
        Applicability::only({static_cast<Stereotype>(pick(rng, 8)),
                             static_cast<Stereotype>(pick(rng, 8))});
  const auto n = pick(rng, 3);
  for (std::uint64_t i = 0; i < n; ++i) {
    ParameterSpec p;
    p.name = "p" + std::to_string(i);
    p.kind = static_cast<ParamKind>(pick(rng, 5));
    p.required = coin(rng);
    p.repeated = coin(rng);
    if (p.kind == ParamKind::Enum)
      p.options = {"a", "b"};
    r.meta.params.push_back(p);
  }
  r.repo = {UserId(nonempty(rng)), coin(rng), coin(rng), coin(rng)};
  // blobs are opaque bytes, include a few that are not valid UTF-8
  const auto len = pick(rng, 40);
  for (std::uint64_t i = 0; i < len; ++i)
    r.blob.push_back(static_cast<char>(pick(rng, 256)));
  return r;
}

} // namespace

std::string random_text(Rng &rng, std::size_t maxLen) {
  static const std::vector<std::string> pieces{
      "a", "b", "Z", "0", " ", "-", "_", "\"", "\\", "/", "\n", "\xc3\xa9",
      "\xe2\x82\xac", "{", "}"};
  std::string s;
  const auto n = pick(rng, maxLen + 1);
  for (std::uint64_t i = 0; i < n; ++i)
    s += one_of(rng, pieces);
  return s;
}

UIObject random_object(Rng &rng) {
  UIObject o;
  o.objectId = ObjectId("o" + std::to_string(pick(rng, 1000)));
  o.owner = UserId(nonempty(rng));
  o.name = nonempty(rng);
  for (std::uint64_t i = pick(rng, 3); i > 0; --i)
    o.tags.insert(random_text(rng, 4));
  o.stereotype = static_cast<Stereotype>(pick(rng, 8));
  o.locator = {one_of(rng, kUrls), one_of(rng, kPaths)};
  for (std::uint64_t i = pick(rng, 3); i > 0; --i)
    o.enabledBehaviours.insert(BehaviourId(nonempty(rng)));
  o.createdAt = rng() >> 12;
  return o;
}

Rule random_rule_shape(Rng &rng) {
  Rule r;
  r.ruleId = RuleId(coin(rng) ? "" : "r" + std::to_string(pick(rng, 100)));
  r.owner = UserId(nonempty(rng));
  for (std::uint64_t i = 1 + pick(rng, 3); i > 0; --i) {
    Predicate p;
    p.kind = static_cast<PredicateKind>(pick(rng, 3));
    p.a = random_selector(rng);
    if (p.kind == PredicateKind::SessionsSameDevice)
      p.b = random_selector(rng);
    else
      p.objectId = ObjectId("o" + std::to_string(pick(rng, 10)));
    r.condition.push_back(p);
  }
  for (std::uint64_t i = 1 + pick(rng, 2); i > 0; --i) {
    RuleAction a{BehaviourId(nonempty(rng)), {}};
    for (std::uint64_t k = pick(rng, 3); k > 0; --k)
      a.bindings[nonempty(rng)] = random_binding(rng);
    r.actions.push_back(a);
  }
  r.enabled = coin(rng);
  r.createdAt = rng() >> 12;
  return r;
}

SessionCommand random_command(Rng &rng) {
  SessionCommand c;
  c.target = SessionId("s" + std::to_string(pick(rng, 50)));
  c.action = static_cast<CommandAction>(pick(rng, 10));
  const ObjectId obj("o" + std::to_string(pick(rng, 50)));
  switch (c.action) {
  case CommandAction::Navigate:
    c.url = one_of(rng, kUrls);
    break;
  case CommandAction::OpenUrlWithObjects:
    c.url = one_of(rng, kUrls);
    for (std::uint64_t i = 1 + pick(rng, 3); i > 0; --i)
      c.objects.push_back(ObjectId("o" + std::to_string(pick(rng, 50))));
    break;
  case CommandAction::ReplayEvent: {
    c.objectId = obj;
    DomEventDescriptor e{obj, nonempty(rng), one_of(rng, std::vector<std::string>{"/", "/0", "/2/1"}), std::nullopt};
    if (coin(rng))
      e.payload = random_text(rng);
    c.event = e;
    break;
  }
  case CommandAction::ApplyMutation: {
    c.objectId = obj;
    ContentMutationDescriptor m;
    m.objectId = obj;
    m.relativeTargetPath = one_of(rng, std::vector<std::string>{"/", "/1"});
    if (coin(rng)) {
      m.newText = random_text(rng);
    } else {
      m.attribute = nonempty(rng);
      m.attributeValue = random_text(rng);
    }
    m.originSeq = rng() >> 12;
    c.mutation = m;
    break;
  }
  case CommandAction::ApplyEffect:
    c.objectId = obj;
    c.effect = static_cast<Effect>(pick(rng, 3));
    break;
  case CommandAction::MediaControl:
    c.objectId = obj;
    c.media = static_cast<MediaVerb>(pick(rng, 2));
    break;
  case CommandAction::Capture:
    c.objectId = obj;
    c.stream = static_cast<CaptureStream>(pick(rng, 3));
    break;
  default:
    c.objectId = obj;
  }
  return c;
}

WireMessage random_message(Rng &rng) {
  WireMessage m;
  m.msgId = nonempty(rng);
  if (coin(rng))
    m.serverSeq = rng() >> 12;

  switch (static_cast<Kind>(pick(rng, 17))) {
  case Kind::Hello:
    m.payload = Hello{UserId(nonempty(rng)), random_text(rng), random_device(rng), coin(rng)};
    break;
  case Kind::Welcome: {
    Welcome w{SessionId(nonempty(rng)), random_text(rng), {}, {}};
    for (auto i = pick(rng, 3); i > 0; --i)
      w.pim.objects.push_back(random_object(rng));
    for (auto i = pick(rng, 2); i > 0; --i)
      w.pim.rules.push_back(random_rule_shape(rng));
    for (auto i = pick(rng, 3); i > 0; --i)
      w.ledger.sessions.push_back(random_entry(rng));
    for (auto i = pick(rng, 3); i > 0; --i)
      w.ledger.records.push_back(random_record(rng));
    m.payload = w;
    break;
  }
  case Kind::CollectObject: {
    auto o = random_object(rng);
    m.payload = CollectObject{random_text(rng), o.tags, o.stereotype, o.locator};
    break;
  }
  case Kind::UpdateObject:
    m.payload = UpdateObject{random_object(rng)};
    break;
  case Kind::DeleteObject:
    m.payload = DeleteObject{ObjectId(nonempty(rng))};
    break;
  case Kind::DefineRule:
    m.payload = DefineRule{random_rule_shape(rng)};
    break;
  case Kind::DeleteRule:
    m.payload = DeleteRule{RuleId(nonempty(rng))};
    break;
  case Kind::PresenceUpdate: {
    PresenceUpdate p;
    if (coin(rng))
      p.url = one_of(rng, kUrls);
    for (auto i = pick(rng, 4); i > 0; --i)
      p.records.push_back(random_record(rng));
    for (auto i = pick(rng, 2); i > 0; --i)
      p.sessions.push_back(random_entry(rng));
    m.payload = p;
    break;
  }
  case Kind::InvokeBehaviour: {
    InvokeBehaviour inv{BehaviourId(nonempty(rng)), {}};
    for (auto i = pick(rng, 4); i > 0; --i)
      inv.bindings[nonempty(rng)] = random_binding(rng);
    m.payload = inv;
    break;
  }
  case Kind::SessionCommand:
    m.payload = SessionCommandMsg{random_command(rng)};
    break;
  case Kind::DomEvent:
    m.payload = DomEvent{{ObjectId(nonempty(rng)), nonempty(rng), "/0", std::nullopt}};
    break;
  case Kind::NavigationCommand:
    m.payload = NavigationCommand{ObjectId(nonempty(rng)), one_of(rng, kUrls)};
    break;
  case Kind::ContentMutation: {
    ContentMutationDescriptor d;
    d.objectId = ObjectId(nonempty(rng));
    d.newText = random_text(rng);
    d.originSeq = pick(rng, 1000);
    m.payload = ContentMutation{d};
    break;
  }
  case Kind::UploadBehaviour:
    m.payload = UploadBehaviour{random_behaviour_record(rng)};
    break;
  case Kind::FetchBehaviour: {
    FetchBehaviour f;
    if (coin(rng))
      f.behaviour = BehaviourId(nonempty(rng));
    for (auto i = pick(rng, 3); i > 0; --i)
      f.records.push_back(random_behaviour_record(rng));
    m.payload = f;
    break;
  }
  case Kind::Ack: {
    Ack a{nonempty(rng), rng() >> 12, std::nullopt};
    if (coin(rng))
      a.ref = nonempty(rng);
    m.payload = a;
    break;
  }
  case Kind::Error: {
    ErrorMsg e{nonempty(rng), std::nullopt, random_text(rng), std::nullopt};
    if (coin(rng))
      e.cause = nonempty(rng);
    if (coin(rng))
      e.ackOf = nonempty(rng);
    m.payload = e;
    break;
  }
  }
  return m;
}

} // namespace testsupport
