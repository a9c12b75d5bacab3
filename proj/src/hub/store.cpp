#include "pimhub/hub/store.hpp"

#include <fstream>
#include <sstream>

#include "pimhub/core/error.hpp"
#include "pimhub/wire/json.hpp"

namespace pimhub {
namespace {

constexpr const char *kStoreFormat = "pimhub-store";
constexpr const char *kAuthFormat = "pimhub-auth";
constexpr int kVersion = 1;

[[noreturn]] void corrupt(const std::string &why) {
  throw Error(Errc::CorruptStore, why);
}

std::optional<std::string> read_file(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::filesystem::path &p, const std::string &content) {
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out)
      throw std::runtime_error("short write on " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

Json credentials_json(const Credentials &c) {
  return Json{{"salt", c.salt}, {"hash", c.hash}};
}

} // namespace

std::string serialize_state(const DurableState &state, bool withCredentials) {
  Json users = Json::object();
  for (const auto &[id, rec] : state.users) {
    Json objects = Json::array();
    for (const auto &[oid, o] : rec.objects)
      objects.push_back(o);
    Json rules = Json::array();
    for (const auto &[rid, r] : rec.rules)
      rules.push_back(r);
    Json u{{"objects", objects}, {"rules", rules}};
    if (withCredentials)
      u["credentials"] = credentials_json(rec.credentials);
    users[id.str()] = std::move(u);
  }
  Json repo = Json::array();
  for (const auto &[id, r] : state.repo)
    repo.push_back(r);
  Json doc{{"format", kStoreFormat},
           {"version", kVersion},
           {"counters", Json{{"nextObject", state.counters.nextObject},
                             {"nextRule", state.counters.nextRule},
                             {"nextSession", state.counters.nextSession}}},
           {"users", users},
           {"repo", repo}};
  return doc.dump();
}

std::string serialize_auth(const DurableState &state) {
  Json users = Json::object();
  for (const auto &[id, rec] : state.users)
    users[id.str()] = credentials_json(rec.credentials);
  return Json{{"format", kAuthFormat}, {"version", kVersion}, {"users", users}}.dump();
}

DurableState parse_state(std::string_view pim, std::optional<std::string_view> auth) {
  Json doc = Json::parse(pim, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    corrupt("store is not a JSON object");
  DurableState state;
  try {
    if (doc.at("format") != kStoreFormat || doc.at("version") != kVersion)
      corrupt("unrecognised store format/version");
    const auto &c = doc.at("counters");
    state.counters.nextObject = c.at("nextObject").get<std::uint64_t>();
    state.counters.nextRule = c.at("nextRule").get<std::uint64_t>();
    state.counters.nextSession = c.at("nextSession").get<std::uint64_t>();
    for (const auto &[id, u] : doc.at("users").items()) {
      UserRecord rec;
      for (const auto &o : u.at("objects")) {
        auto obj = o.get<UIObject>();
        if (obj.owner.str() != id)
          corrupt("object " + obj.objectId.str() + " filed under wrong user");
        rec.objects.emplace(obj.objectId, std::move(obj));
      }
      for (const auto &r : u.at("rules")) {
        auto rule = r.get<Rule>();
        rec.rules.emplace(rule.ruleId, std::move(rule));
      }
      if (u.contains("credentials")) {
        rec.credentials.salt = u.at("credentials").at("salt").get<std::string>();
        rec.credentials.hash = u.at("credentials").at("hash").get<std::string>();
      }
      state.users.emplace(UserId(id), std::move(rec));
    }
    for (const auto &r : doc.at("repo")) {
      auto record = r.get<BehaviourRecord>();
      state.repo.emplace(record.meta.id, std::move(record));
    }
    if (auth) {
      Json a = Json::parse(*auth, nullptr, false);
      if (a.is_discarded() || !a.is_object() || a.value("format", "") != kAuthFormat)
        corrupt("auth store is not a pimhub-auth document");
      for (const auto &[id, cred] : a.at("users").items()) {
        auto &rec = state.users[UserId(id)];
        rec.credentials.salt = cred.at("salt").get<std::string>();
        rec.credentials.hash = cred.at("hash").get<std::string>();
      }
    }
  } catch (const nlohmann::json::exception &e) {
    corrupt(e.what());
  } catch (const Error &e) {
    if (e.code() == Errc::CorruptStore)
      throw;
    corrupt(e.what());
  }
  for (const auto &[id, rec] : state.users)
    if (rec.credentials.hash.empty())
      corrupt("user " + id.str() + " has no credentials");
  return state;
}

std::optional<DurableState> MemoryStore::load() {
  if (!doc_)
    return std::nullopt;
  return parse_state(*doc_);
}

void MemoryStore::save(const DurableState &state) { doc_ = serialize_state(state); }

FileStore::FileStore(std::filesystem::path pimPath,
                     std::optional<std::filesystem::path> authPath)
    : pimPath_(std::move(pimPath)), authPath_(std::move(authPath)) {}

std::optional<DurableState> FileStore::load() {
  auto pim = read_file(pimPath_);
  if (!pim)
    return std::nullopt;
  if (!authPath_)
    return parse_state(*pim);
  auto auth = read_file(*authPath_);
  if (!auth)
    corrupt("auth store " + authPath_->string() + " missing");
  return parse_state(*pim, std::string_view(*auth));
}

void FileStore::save(const DurableState &state) {
  if (authPath_) {
    write_atomic(*authPath_, serialize_auth(state));
    write_atomic(pimPath_, serialize_state(state, false));
  } else {
    write_atomic(pimPath_, serialize_state(state));
  }
}

} // namespace pimhub
