#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "pimhub/behaviour/types.hpp"
#include "pimhub/hub/auth.hpp"
#include "pimhub/rules/rule.hpp"

namespace pimhub {

struct UserRecord {
  Credentials credentials;
  std::map<ObjectId, UIObject> objects;
  std::map<RuleId, Rule> rules;

  friend bool operator==(const UserRecord &, const UserRecord &) = default;
};

struct Counters {
  std::uint64_t nextObject = 1;
  std::uint64_t nextRule = 1;
  std::uint64_t nextSession = 1;

  friend bool operator==(const Counters &, const Counters &) = default;
};

/// Everything that survives a hub restart. Presence and routes do not.
struct DurableState {
  std::map<UserId, UserRecord> users;
  std::map<BehaviourId, BehaviourRecord> repo;
  Counters counters;

  friend bool operator==(const DurableState &, const DurableState &) = default;
};

/// Snapshot documents. With `withCredentials` false the credentials live in
/// a separate auth document (see serialize_auth).
std::string serialize_state(const DurableState &state, bool withCredentials = true);
std::string serialize_auth(const DurableState &state);

/// Throws Error(CorruptStore). `auth`, when given, supplies the credentials.
DurableState parse_state(std::string_view pim,
                         std::optional<std::string_view> auth = std::nullopt);

class PimStore {
public:
  virtual ~PimStore() = default;
  /// nullopt when nothing has been stored yet. Throws Error(CorruptStore).
  virtual std::optional<DurableState> load() = 0;
  virtual void save(const DurableState &state) = 0;
};

class MemoryStore final : public PimStore {
public:
  std::optional<DurableState> load() override;
  void save(const DurableState &state) override;

  const std::optional<std::string> &document() const noexcept { return doc_; }
  void set_document(std::string doc) { doc_ = std::move(doc); }

private:
  std::optional<std::string> doc_;
};

/// Writes go to a temporary file that is renamed over the target.
class FileStore final : public PimStore {
public:
  explicit FileStore(std::filesystem::path pimPath,
                     std::optional<std::filesystem::path> authPath = std::nullopt);

  std::optional<DurableState> load() override;
  void save(const DurableState &state) override;

private:
  std::filesystem::path pimPath_;
  std::optional<std::filesystem::path> authPath_;
};

} // namespace pimhub
