#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pimhub/behaviour/types.hpp"
#include "pimhub/core/model.hpp"
#include "pimhub/core/presence.hpp"
#include "pimhub/rules/rule.hpp"
#include "pimhub/wire/commands.hpp"

namespace pimhub::wire {

// Payload records, one per message kind. Direction noted as C->H (client to
// hub), H->C, or both.

/// C->H. `registerUser` creates the account on first contact.
struct Hello {
  UserId user;
  std::string password;
  DeviceInfo device;
  bool registerUser = false;
  friend bool operator==(const Hello &, const Hello &) = default;
};

struct PimSnapshot {
  std::vector<UIObject> objects;
  std::vector<Rule> rules;
  friend bool operator==(const PimSnapshot &, const PimSnapshot &) = default;
};

struct LedgerSnapshot {
  std::vector<SessionEntry> sessions;
  std::vector<PresenceRecord> records;
  friend bool operator==(const LedgerSnapshot &, const LedgerSnapshot &) = default;
};

/// H->C, answer to Hello.
struct Welcome {
  SessionId session;
  std::string token;
  PimSnapshot pim;
  LedgerSnapshot ledger;
  friend bool operator==(const Welcome &, const Welcome &) = default;
};

/// C->H. The hub assigns the id and answers with UpdateObject to every
/// session of the user.
struct CollectObject {
  std::string name;
  std::set<std::string> tags;
  Stereotype stereotype = Stereotype::Generic;
  Locator locator;
  friend bool operator==(const CollectObject &, const CollectObject &) = default;
};

/// Both directions. Full replacement of an object (rename, tags, behaviours).
struct UpdateObject {
  UIObject object;
  friend bool operator==(const UpdateObject &, const UpdateObject &) = default;
};

struct DeleteObject {
  ObjectId object;
  friend bool operator==(const DeleteObject &, const DeleteObject &) = default;
};

/// Both directions. An empty ruleId from a client creates a rule.
struct DefineRule {
  Rule rule;
  friend bool operator==(const DefineRule &, const DefineRule &) = default;
};

struct DeleteRule {
  RuleId rule;
  friend bool operator==(const DeleteRule &, const DeleteRule &) = default;
};

/// Both directions. Clients report their current URL plus the records that
/// changed; the hub relays records and directory entries.
struct PresenceUpdate {
  std::optional<std::string> url;
  std::vector<PresenceRecord> records;
  std::vector<SessionEntry> sessions;
  friend bool operator==(const PresenceUpdate &, const PresenceUpdate &) = default;
};

/// C->H.
struct InvokeBehaviour {
  BehaviourId behaviour;
  Bindings bindings;
  friend bool operator==(const InvokeBehaviour &, const InvokeBehaviour &) = default;
};

/// H->C.
struct SessionCommandMsg {
  SessionCommand command;
  friend bool operator==(const SessionCommandMsg &,
                         const SessionCommandMsg &) = default;
};

/// C->H, emitted while a Dom capture is active.
struct DomEvent {
  DomEventDescriptor event;
  friend bool operator==(const DomEvent &, const DomEvent &) = default;
};

/// C->H, emitted instead of navigating while a Navigation capture is active.
struct NavigationCommand {
  ObjectId object;
  std::string url;
  friend bool operator==(const NavigationCommand &,
                         const NavigationCommand &) = default;
};

/// C->H.
struct ContentMutation {
  ContentMutationDescriptor mutation;
  friend bool operator==(const ContentMutation &, const ContentMutation &) = default;
};

/// C->H.
struct UploadBehaviour {
  BehaviourRecord record;
  friend bool operator==(const UploadBehaviour &, const UploadBehaviour &) = default;
};

/// Request (C->H): no records; `behaviour` set to fetch one record with its
/// blob, unset to list. Response (H->C): `records` filled; listings carry
/// empty blobs.
struct FetchBehaviour {
  std::optional<BehaviourId> behaviour;
  std::vector<BehaviourRecord> records;
  friend bool operator==(const FetchBehaviour &, const FetchBehaviour &) = default;
};

/// H->C. `acceptedSeq` is the serverSeq the acknowledged message received.
struct Ack {
  std::string ackOf;
  std::uint64_t acceptedSeq = 0;
  std::optional<std::string> ref;
  friend bool operator==(const Ack &, const Ack &) = default;
};

/// H->C.
struct ErrorMsg {
  std::string code;
  std::optional<std::string> cause;
  std::string message;
  std::optional<std::string> ackOf;
  friend bool operator==(const ErrorMsg &, const ErrorMsg &) = default;
};

using Payload =
    std::variant<Hello, Welcome, CollectObject, UpdateObject, DeleteObject,
                 DefineRule, DeleteRule, PresenceUpdate, InvokeBehaviour,
                 SessionCommandMsg, DomEvent, NavigationCommand,
                 ContentMutation, UploadBehaviour, FetchBehaviour, Ack,
                 ErrorMsg>;

enum class Kind {
  Hello,
  Welcome,
  CollectObject,
  UpdateObject,
  DeleteObject,
  DefineRule,
  DeleteRule,
  PresenceUpdate,
  InvokeBehaviour,
  SessionCommand,
  DomEvent,
  NavigationCommand,
  ContentMutation,
  UploadBehaviour,
  FetchBehaviour,
  Ack,
  Error,
};

inline constexpr std::array<std::string_view, 17> kKindNames{
    "Hello",          "Welcome",         "CollectObject",  "UpdateObject",
    "DeleteObject",   "DefineRule",      "DeleteRule",     "PresenceUpdate",
    "InvokeBehaviour", "SessionCommand", "DomEvent",       "NavigationCommand",
    "ContentMutation", "UploadBehaviour", "FetchBehaviour", "Ack",
    "Error"};

inline std::string_view to_string(Kind k) noexcept {
  return kKindNames[static_cast<std::size_t>(k)];
}

std::optional<Kind> parse_kind(std::string_view s) noexcept;

struct WireMessage {
  std::string msgId;
  std::optional<std::uint64_t> serverSeq;
  Payload payload;

  Kind kind() const noexcept { return static_cast<Kind>(payload.index()); }

  template <typename T>
  const T *as() const noexcept {
    return std::get_if<T>(&payload);
  }

  friend bool operator==(const WireMessage &, const WireMessage &) = default;
};

} // namespace pimhub::wire
