#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pimhub/core/ids.hpp"
#include "pimhub/core/model.hpp"

namespace pimhub {

enum class PresenceState { Offline, Online };

std::string_view to_string(PresenceState s) noexcept;
std::optional<PresenceState> parse_presence_state(std::string_view s) noexcept;

struct PresenceRecord {
  ObjectId objectId;
  SessionId sessionId;
  PresenceState state = PresenceState::Offline;
  std::uint64_t seq = 0;

  friend bool operator==(const PresenceRecord &,
                         const PresenceRecord &) = default;
};

/// Directory entry. Closed sessions stay in the directory with live=false so
/// their Offline records keep a valid referent.
struct SessionEntry {
  SessionId sessionId;
  UserId user;
  DeviceInfo device;
  std::string currentUrl;
  bool live = true;

  friend bool operator==(const SessionEntry &, const SessionEntry &) = default;
};

/// Online iff the locator's URL pattern matches and the element was found.
PresenceState resolve_presence(const UIObject &object,
                               std::string_view sessionUrl, bool elementFound);

class PresenceLedger {
public:
  using Key = std::pair<ObjectId, SessionId>;

  void upsert_session(SessionEntry entry);
  const SessionEntry *session(const SessionId &id) const;
  bool is_live(const SessionId &id) const;

  /// Last-seq-wins. Returns true when the key is new or its state flipped.
  /// Throws Error(UnknownSession) if the session is not in the directory.
  bool apply(const PresenceRecord &record);

  /// Marks the session not live and every Online record of it Offline with
  /// seq = (highest seq seen from that session) + 1. Returns the rewritten
  /// records.
  std::vector<PresenceRecord> close_session(const SessionId &id);

  void erase_object(const ObjectId &object);

  PresenceState state(const ObjectId &object, const SessionId &session) const;
  const PresenceRecord *record(const ObjectId &object,
                               const SessionId &session) const;
  std::uint64_t last_seq(const SessionId &session) const;

  /// Live sessions of `owner` where `object` is Online, ascending.
  std::vector<SessionId> online_sessions(const ObjectId &object,
                                         const UserId &owner) const;
  /// Live sessions of `owner`, ascending.
  std::vector<SessionId> live_sessions(const UserId &owner) const;

  /// The slice a given user is allowed to see: its sessions and their records.
  PresenceLedger view_for(const UserId &user) const;

  const std::map<Key, PresenceRecord> &records() const noexcept {
    return records_;
  }
  const std::map<SessionId, SessionEntry> &directory() const noexcept {
    return directory_;
  }

  /// Compares records and directory; the per-session seq high-water mark is
  /// bookkeeping and not part of the observable state.
  friend bool operator==(const PresenceLedger &a, const PresenceLedger &b) {
    return a.records_ == b.records_ && a.directory_ == b.directory_;
  }

private:
  std::map<Key, PresenceRecord> records_;
  std::map<SessionId, SessionEntry> directory_;
  std::map<SessionId, std::uint64_t> lastSeq_;
};

/// Value-semantics form of PresenceLedger::apply.
std::pair<PresenceLedger, bool> apply_presence_update(PresenceLedger ledger,
                                                      const PresenceRecord &record);

} // namespace pimhub
