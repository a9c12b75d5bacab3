#include "pimhub/wire/commands.hpp"

#include <array>

#include "pimhub/core/element_path.hpp"
#include "pimhub/core/error.hpp"
#include "pimhub/core/url.hpp"

namespace pimhub {
namespace {

constexpr std::array<std::string_view, 10> kActions{
    "Hide",          "Show",        "ShowOnly",     "Navigate",
    "ReplayEvent",   "ApplyMutation", "OpenUrlWithObjects",
    "ApplyEffect",   "MediaControl",  "Capture"};
constexpr std::array<std::string_view, 3> kEffects{"Highlight", "Hide",
                                                   "Focus"};
constexpr std::array<std::string_view, 2> kVerbs{"Play", "Stop"};
constexpr std::array<std::string_view, 3> kStreams{"Dom", "Navigation",
                                                   "Mutation"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N> &names,
                        std::string_view s) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s)
      return static_cast<E>(i);
  return std::nullopt;
}

[[noreturn]] void violation(const std::string &what) {
  throw Error(Errc::SchemaViolation, what);
}

void require(bool ok, const std::string &what) {
  if (!ok)
    violation(what);
}

} // namespace

std::string_view to_string(CommandAction a) noexcept {
  return kActions[static_cast<std::size_t>(a)];
}
std::string_view to_string(Effect e) noexcept {
  return kEffects[static_cast<std::size_t>(e)];
}
std::string_view to_string(MediaVerb v) noexcept {
  return kVerbs[static_cast<std::size_t>(v)];
}
std::string_view to_string(CaptureStream s) noexcept {
  return kStreams[static_cast<std::size_t>(s)];
}
std::optional<CommandAction> parse_command_action(std::string_view s) noexcept {
  return lookup<CommandAction>(kActions, s);
}
std::optional<Effect> parse_effect(std::string_view s) noexcept {
  return lookup<Effect>(kEffects, s);
}
std::optional<MediaVerb> parse_media_verb(std::string_view s) noexcept {
  return lookup<MediaVerb>(kVerbs, s);
}
std::optional<CaptureStream> parse_capture_stream(std::string_view s) noexcept {
  return lookup<CaptureStream>(kStreams, s);
}

void validate(const DomEventDescriptor &event) {
  require(!event.objectId.empty(), "DomEvent.objectId empty");
  require(!event.eventType.empty(), "DomEvent.eventType empty");
  require(parse_relative_path(event.relativeTargetPath).has_value(),
          "DomEvent.relativeTargetPath malformed");
}

void validate(const ContentMutationDescriptor &mutation) {
  require(!mutation.objectId.empty(), "ContentMutation.objectId empty");
  require(parse_relative_path(mutation.relativeTargetPath).has_value(),
          "ContentMutation.relativeTargetPath malformed");
  const bool text = mutation.newText.has_value();
  const bool attr = mutation.attribute.has_value();
  require(text != attr, "ContentMutation needs exactly one of newText/attribute");
  require(attr == mutation.attributeValue.has_value(),
          "ContentMutation.attributeValue must accompany attribute");
  require(!attr || !mutation.attribute->empty(),
          "ContentMutation.attribute empty");
}

void validate(const SessionCommand &cmd) {
  using A = CommandAction;
  require(!cmd.target.empty(), "SessionCommand.target empty");
  const A a = cmd.action;
  const bool objectScoped = a != A::Navigate && a != A::OpenUrlWithObjects;
  const std::string name(to_string(a));

  if (objectScoped)
    require(cmd.objectId && !cmd.objectId->empty(), name + " needs objectId");
  require(cmd.url.has_value() == (a == A::Navigate || a == A::OpenUrlWithObjects),
          name + ": url presence");
  if (cmd.url)
    require(is_absolute_url(*cmd.url), name + ": url not absolute");
  require(cmd.objects.empty() != (a == A::OpenUrlWithObjects),
          name + ": objects presence");
  require(cmd.event.has_value() == (a == A::ReplayEvent), name + ": event presence");
  require(cmd.mutation.has_value() == (a == A::ApplyMutation),
          name + ": mutation presence");
  require(cmd.effect.has_value() == (a == A::ApplyEffect), name + ": effect presence");
  require(cmd.media.has_value() == (a == A::MediaControl), name + ": media presence");
  require(cmd.stream.has_value() == (a == A::Capture), name + ": stream presence");

  if (cmd.event) {
    validate(*cmd.event);
    require(cmd.event->objectId == *cmd.objectId, "ReplayEvent object mismatch");
  }
  if (cmd.mutation) {
    validate(*cmd.mutation);
    require(cmd.mutation->objectId == *cmd.objectId,
            "ApplyMutation object mismatch");
  }
  for (const auto &o : cmd.objects)
    require(!o.empty(), "OpenUrlWithObjects: empty object id");
}

SessionCommand object_command(SessionId target, CommandAction action,
                              ObjectId object) {
  SessionCommand cmd;
  cmd.target = std::move(target);
  cmd.action = action;
  cmd.objectId = std::move(object);
  return cmd;
}

} // namespace pimhub
