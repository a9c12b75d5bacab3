#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pimhub/behaviour/registry.hpp"
#include "pimhub/hub/store.hpp"
#include "pimhub/rules/engine.hpp"
#include "pimhub/wire/codec.hpp"

namespace pimhub {

using ConnectionId = std::uint64_t;

/// One outbound message. `origin` is the session whose message caused it,
/// so a transport that cannot deliver a command can report TargetGone back.
struct Delivery {
  ConnectionId to = 0;
  wire::WireMessage message;
  std::optional<SessionId> origin;

  friend bool operator==(const Delivery &, const Delivery &) = default;
};

enum class LogEvent { Open, In, Out, Close, Gone };

std::string_view to_string(LogEvent e) noexcept;

/// Every transport-visible event, in processing order. Enough to rebuild the
/// hub's state by feeding the Open/In/Close/Gone entries to a fresh hub.
struct LogEntry {
  LogEvent event = LogEvent::In;
  ConnectionId connection = 0;
  std::optional<wire::WireMessage> message;
  std::optional<SessionId> origin; // Gone entries only

  friend bool operator==(const LogEntry &, const LogEntry &) = default;
};

struct HubOptions {
  std::uint64_t seed = 0;
  /// Drop client messages whose msgId was already seen on the connection.
  bool dedupe = true;
  bool keepLog = true;
};

/// The single serialization point. Not thread-safe: transports funnel every
/// call through one strand. All state changes happen inside these calls and
/// are visible before the returned deliveries are sent.
class Hub {
public:
  explicit Hub(HubOptions options = {}, std::shared_ptr<PimStore> store = nullptr);

  std::vector<Delivery> open(ConnectionId conn);
  std::vector<Delivery> receive(ConnectionId conn, wire::WireMessage msg);
  /// Decode failures are answered with an Error on the same connection.
  std::vector<Delivery> receive_frame(ConnectionId conn, std::string_view frame);
  std::vector<Delivery> close(ConnectionId conn);
  /// The transport could not deliver `d`; the originator of a command hears
  /// TargetGone.
  std::vector<Delivery> undeliverable(const Delivery &d);

  const PresenceLedger &ledger() const noexcept { return ledger_; }
  const DurableState &durable() const noexcept { return durable_; }
  const std::set<Route> &routes() const noexcept { return routes_; }
  const FiringState &firing() const noexcept { return firing_; }
  const BehaviourRegistry &registry() const noexcept { return registry_; }
  const std::vector<LogEntry> &log() const noexcept { return log_; }
  std::uint64_t fire_count(const RuleId &rule) const;

  std::optional<SessionId> session_of(ConnectionId conn) const;
  std::optional<ConnectionId> connection_of(const SessionId &session) const;

  /// What a session of `user` should hold after replaying its inbox.
  wire::PimSnapshot pim_for(const UserId &user) const;

  Json state_json() const;
  /// SHA-256 of the canonical state_json dump.
  std::string state_digest() const;

  const UIObject *find_object(const ObjectId &id) const;

private:
  struct Conn {
    std::optional<SessionId> session;
    std::set<std::string> seen;
  };
  struct Ctx;

  void dispatch(Ctx &ctx, const wire::WireMessage &msg);
  void on_hello(Ctx &ctx, const wire::Hello &m);
  void on_collect(Ctx &ctx, const wire::CollectObject &m);
  void on_update(Ctx &ctx, const wire::UpdateObject &m);
  void on_delete(Ctx &ctx, const wire::DeleteObject &m);
  void on_define_rule(Ctx &ctx, const wire::DefineRule &m);
  void on_delete_rule(Ctx &ctx, const wire::DeleteRule &m);
  void on_presence(Ctx &ctx, const wire::PresenceUpdate &m);
  void on_invoke(Ctx &ctx, const wire::InvokeBehaviour &m);
  void on_dom_event(Ctx &ctx, const wire::DomEvent &m);
  void on_navigation(Ctx &ctx, const wire::NavigationCommand &m);
  void on_mutation(Ctx &ctx, const wire::ContentMutation &m);
  void on_upload(Ctx &ctx, const wire::UploadBehaviour &m);
  void on_fetch(Ctx &ctx, const wire::FetchBehaviour &m);

  void send(std::vector<Delivery> &out, ConnectionId to, wire::Payload payload,
            const std::optional<SessionId> &origin);
  void send_session(std::vector<Delivery> &out, const SessionId &to,
                    wire::Payload payload, const std::optional<SessionId> &origin);
  void broadcast(std::vector<Delivery> &out, const UserId &user,
                 const wire::Payload &payload, const std::optional<SessionId> &except,
                 const std::optional<SessionId> &origin);
  void route_plan(std::vector<Delivery> &out, const Plan &plan,
                  const std::optional<SessionId> &origin);
  void run_rules(std::vector<Delivery> &out, const UserId &user,
                 const std::optional<SessionId> &origin);

  UserRecord &user_record(const UserId &user);
  UIObject &owned_object(const UserId &user, const ObjectId &id);
  bool behaviour_visible(const UserId &user, const BehaviourRecord &r) const;
  void check_attachable(const UserId &user, const UIObject &obj) const;
  void compile_all();
  void persist();

  HubOptions options_;
  std::shared_ptr<PimStore> store_;
  std::mt19937_64 rng_;
  BehaviourRegistry registry_;
  DurableState durable_;
  std::map<ObjectId, UserId> objectOwner_;
  std::map<UserId, std::map<RuleId, CompiledRule>> compiled_;
  FiringState firing_;
  std::map<RuleId, std::uint64_t> fireCounts_;
  PresenceLedger ledger_;
  std::set<Route> routes_;
  std::map<std::pair<ObjectId, SessionId>, std::uint64_t> lastOriginSeq_;
  std::map<ConnectionId, Conn> conns_;
  std::map<SessionId, ConnectionId> sessionConn_;
  wire::Sequencer seq_;
  std::uint64_t outCounter_ = 1;
  ObjectLookup lookup_;
  std::vector<LogEntry> log_;
};

} // namespace pimhub
