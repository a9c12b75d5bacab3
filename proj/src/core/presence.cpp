#include "pimhub/core/presence.hpp"

#include <algorithm>

#include "pimhub/core/error.hpp"
#include "pimhub/core/url.hpp"

namespace pimhub {

std::string_view to_string(PresenceState s) noexcept {
  return s == PresenceState::Online ? "Online" : "Offline";
}

std::optional<PresenceState> parse_presence_state(std::string_view s) noexcept {
  if (s == "Online")
    return PresenceState::Online;
  if (s == "Offline")
    return PresenceState::Offline;
  return std::nullopt;
}

PresenceState resolve_presence(const UIObject &object,
                               std::string_view sessionUrl, bool elementFound) {
  if (elementFound && url_pattern_matches(object.locator.urlPattern, sessionUrl))
    return PresenceState::Online;
  return PresenceState::Offline;
}

void PresenceLedger::upsert_session(SessionEntry entry) {
  auto id = entry.sessionId;
  directory_.insert_or_assign(std::move(id), std::move(entry));
}

const SessionEntry *PresenceLedger::session(const SessionId &id) const {
  auto it = directory_.find(id);
  return it == directory_.end() ? nullptr : &it->second;
}

bool PresenceLedger::is_live(const SessionId &id) const {
  const auto *entry = session(id);
  return entry && entry->live;
}

bool PresenceLedger::apply(const PresenceRecord &record) {
  if (!directory_.contains(record.sessionId))
    throw Error(Errc::UnknownSession, record.sessionId.str());
  auto &last = lastSeq_[record.sessionId];
  last = std::max(last, record.seq);

  Key key{record.objectId, record.sessionId};
  auto it = records_.find(key);
  if (it == records_.end()) {
    records_.emplace(std::move(key), record);
    return true;
  }
  if (record.seq <= it->second.seq)
    return false;
  const bool flipped = it->second.state != record.state;
  it->second = record;
  return flipped;
}

std::vector<PresenceRecord> PresenceLedger::close_session(const SessionId &id) {
  auto dir = directory_.find(id);
  if (dir == directory_.end())
    throw Error(Errc::UnknownSession, id.str());
  dir->second.live = false;

  std::vector<PresenceRecord> changed;
  const std::uint64_t seq = last_seq(id) + 1;
  for (auto &[key, rec] : records_) {
    if (key.second != id || rec.state == PresenceState::Offline)
      continue;
    rec.state = PresenceState::Offline;
    rec.seq = seq;
    changed.push_back(rec);
  }
  if (!changed.empty())
    lastSeq_[id] = seq;
  return changed;
}

void PresenceLedger::erase_object(const ObjectId &object) {
  std::erase_if(records_,
                [&](const auto &kv) { return kv.first.first == object; });
}

PresenceState PresenceLedger::state(const ObjectId &object,
                                    const SessionId &session) const {
  const auto *rec = record(object, session);
  return rec ? rec->state : PresenceState::Offline;
}

const PresenceRecord *PresenceLedger::record(const ObjectId &object,
                                             const SessionId &session) const {
  auto it = records_.find(Key{object, session});
  return it == records_.end() ? nullptr : &it->second;
}

std::uint64_t PresenceLedger::last_seq(const SessionId &session) const {
  auto it = lastSeq_.find(session);
  return it == lastSeq_.end() ? 0 : it->second;
}

std::vector<SessionId> PresenceLedger::online_sessions(const ObjectId &object,
                                                       const UserId &owner) const {
  std::vector<SessionId> out;
  for (const auto &[id, entry] : directory_)
    if (entry.live && entry.user == owner &&
        state(object, id) == PresenceState::Online)
      out.push_back(id);
  return out;
}

std::vector<SessionId> PresenceLedger::live_sessions(const UserId &owner) const {
  std::vector<SessionId> out;
  for (const auto &[id, entry] : directory_)
    if (entry.live && entry.user == owner)
      out.push_back(id);
  return out;
}

PresenceLedger PresenceLedger::view_for(const UserId &user) const {
  PresenceLedger view;
  for (const auto &[id, entry] : directory_)
    if (entry.user == user)
      view.directory_.emplace(id, entry);
  for (const auto &[key, rec] : records_)
    if (view.directory_.contains(key.second))
      view.records_.emplace(key, rec);
  for (const auto &[id, seq] : lastSeq_)
    if (view.directory_.contains(id))
      view.lastSeq_.emplace(id, seq);
  return view;
}

std::pair<PresenceLedger, bool> apply_presence_update(PresenceLedger ledger,
                                                      const PresenceRecord &record) {
  const bool changed = ledger.apply(record);
  return {std::move(ledger), changed};
}

} // namespace pimhub
