#pragma once

// Synchronous client stand-in for hub tests: every delivery lands in a
// per-connection inbox immediately.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pimhub/hub/hub.hpp"

namespace testsupport {

using namespace pimhub;

class HubDriver {
public:
  explicit HubDriver(std::shared_ptr<PimStore> store = std::make_shared<MemoryStore>(),
                     HubOptions options = {})
      : store_(std::move(store)), hub_(std::make_unique<Hub>(options, store_)) {}

  Hub &hub() { return *hub_; }
  PimStore &store() { return *store_; }

  /// Drops every connection and starts a new hub over the same store.
  void restart(HubOptions options = {}) {
    hub_ = std::make_unique<Hub>(options, store_);
    inbox_.clear();
  }

  ConnectionId open() {
    const ConnectionId c = next_++;
    absorb(hub_->open(c));
    return c;
  }

  /// Opens a connection and says Hello. Returns the connection; the session
  /// id is available through session().
  ConnectionId login(const std::string &user, const std::string &device,
                     DeviceKind kind = DeviceKind::Desktop,
                     const std::string &password = "pw") {
    const ConnectionId c = open();
    send(c, wire::Hello{UserId(user), password, DeviceInfo{DeviceId(device), kind, device}, true});
    return c;
  }

  SessionId session(ConnectionId c) const { return *hub_->session_of(c); }

  std::vector<Delivery> send(ConnectionId c, wire::Payload payload,
                             std::string msgId = {}) {
    if (msgId.empty())
      msgId = "m" + std::to_string(msgCounter_++);
    lastMsgId_ = msgId;
    auto out = hub_->receive(c, wire::WireMessage{msgId, std::nullopt, std::move(payload)});
    absorb(out);
    return out;
  }

  std::vector<Delivery> close(ConnectionId c) {
    auto out = hub_->close(c);
    absorb(out);
    return out;
  }

  const std::string &last_msg_id() const { return lastMsgId_; }

  std::vector<wire::WireMessage> &inbox(ConnectionId c) { return inbox_[c]; }
  void clear() { inbox_.clear(); }

  template <typename T>
  std::vector<T> received(ConnectionId c) const {
    std::vector<T> out;
    auto it = inbox_.find(c);
    if (it == inbox_.end())
      return out;
    for (const auto &m : it->second)
      if (const T *p = m.as<T>())
        out.push_back(*p);
    return out;
  }

  std::vector<SessionCommand> commands(ConnectionId c) const {
    std::vector<SessionCommand> out;
    for (const auto &m : received<wire::SessionCommandMsg>(c))
      out.push_back(m.command);
    return out;
  }

  std::size_t count(ConnectionId c, CommandAction a) const {
    std::size_t n = 0;
    for (const auto &cmd : commands(c))
      n += cmd.action == a;
    return n;
  }

  std::vector<std::string> error_codes(ConnectionId c) const {
    std::vector<std::string> out;
    for (const auto &e : received<wire::ErrorMsg>(c))
      out.push_back(e.code);
    return out;
  }

  /// Collects an object over `c` and returns its id.
  ObjectId collect(ConnectionId c, const std::string &name, const std::string &pattern,
                   const std::string &path = "/",
                   Stereotype stereotype = Stereotype::Generic) {
    auto out = send(c, wire::CollectObject{name, {}, stereotype, Locator{pattern, path}});
    for (const auto &d : out)
      if (auto *a = d.message.as<wire::Ack>(); a && a->ref)
        return ObjectId(*a->ref);
    return {};
  }

  /// Reports `object` Online/Offline in the session on `c` with the next seq.
  std::vector<Delivery> presence(ConnectionId c, const ObjectId &object, bool online,
                                 std::optional<std::string> url = std::nullopt) {
    const SessionId s = session(c);
    wire::PresenceUpdate p;
    p.url = std::move(url);
    p.records.push_back({object, s, online ? PresenceState::Online : PresenceState::Offline,
                         ++presenceSeq_[s]});
    return send(c, p);
  }

private:
  void absorb(const std::vector<Delivery> &out) {
    for (const auto &d : out)
      inbox_[d.to].push_back(d.message);
  }

  std::shared_ptr<PimStore> store_;
  std::unique_ptr<Hub> hub_;
  ConnectionId next_ = 1;
  std::uint64_t msgCounter_ = 1;
  std::string lastMsgId_;
  std::map<ConnectionId, std::vector<wire::WireMessage>> inbox_;
  std::map<SessionId, std::uint64_t> presenceSeq_;
};

} // namespace testsupport
