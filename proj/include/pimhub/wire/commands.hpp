#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pimhub/core/ids.hpp"

namespace pimhub {

enum class CommandAction {
  Hide,
  Show,
  ShowOnly,
  Navigate,
  ReplayEvent,
  ApplyMutation,
  OpenUrlWithObjects,
  ApplyEffect,
  MediaControl,
  // Tells a session to start forwarding one event stream of an object to
  // the hub (DomEvent, NavigationCommand or ContentMutation).
  Capture,
};

enum class Effect { Highlight, Hide, Focus };
enum class MediaVerb { Play, Stop };
enum class CaptureStream { Dom, Navigation, Mutation };

std::string_view to_string(CommandAction a) noexcept;
std::string_view to_string(Effect e) noexcept;
std::string_view to_string(MediaVerb v) noexcept;
std::string_view to_string(CaptureStream s) noexcept;
std::optional<CommandAction> parse_command_action(std::string_view s) noexcept;
std::optional<Effect> parse_effect(std::string_view s) noexcept;
std::optional<MediaVerb> parse_media_verb(std::string_view s) noexcept;
std::optional<CaptureStream> parse_capture_stream(std::string_view s) noexcept;

struct DomEventDescriptor {
  ObjectId objectId;
  std::string eventType;
  std::string relativeTargetPath = "/";
  std::optional<std::string> payload;

  friend bool operator==(const DomEventDescriptor &,
                         const DomEventDescriptor &) = default;
};

/// Either `newText` or an attribute change (`attribute` + `attributeValue`).
struct ContentMutationDescriptor {
  ObjectId objectId;
  std::string relativeTargetPath = "/";
  std::optional<std::string> newText;
  std::optional<std::string> attribute;
  std::optional<std::string> attributeValue;
  std::uint64_t originSeq = 0;

  friend bool operator==(const ContentMutationDescriptor &,
                         const ContentMutationDescriptor &) = default;
};

struct SessionCommand {
  SessionId target;
  CommandAction action = CommandAction::Show;
  std::optional<ObjectId> objectId;
  std::optional<std::string> url;
  std::vector<ObjectId> objects;
  std::optional<DomEventDescriptor> event;
  std::optional<ContentMutationDescriptor> mutation;
  std::optional<Effect> effect;
  std::optional<MediaVerb> media;
  std::optional<CaptureStream> stream;

  friend bool operator==(const SessionCommand &,
                         const SessionCommand &) = default;
};

/// Throws Error(SchemaViolation) unless exactly the arguments required by
/// `cmd.action` are present.
void validate(const SessionCommand &cmd);
void validate(const DomEventDescriptor &event);
void validate(const ContentMutationDescriptor &mutation);

SessionCommand object_command(SessionId target, CommandAction action,
                              ObjectId object);

} // namespace pimhub
