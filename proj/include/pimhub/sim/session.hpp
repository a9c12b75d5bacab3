#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pimhub/core/presence.hpp"
#include "pimhub/sim/page.hpp"
#include "pimhub/wire/message.hpp"

namespace pimhub::sim {

struct SessionConfig {
  std::string alias;
  UserId user;
  std::string password;
  DeviceInfo device;
  bool dedupe = true;
};

/// Headless browser window speaking the wire protocol. Holds the same views
/// a real client would (PIM, ledger) plus a page model the commands act on.
class VirtualSession {
public:
  VirtualSession(SessionConfig config, const PageLibrary &pages);

  const SessionConfig &config() const noexcept { return config_; }
  const std::string &alias() const noexcept { return config_.alias; }

  // -- transport side
  /// Starts a fresh connection: clears connection-scoped state and queues
  /// Hello. Page and counters survive.
  void connect();
  void disconnect() { connected_ = false; }
  bool connected() const noexcept { return connected_; }
  std::vector<wire::WireMessage> take_outbox();
  void deliver(const wire::WireMessage &msg);

  // -- user actions
  void load(std::string_view url);
  std::string send(wire::Payload payload);
  void click(const ObjectId &object, const std::string &path, const std::string &type);
  /// Link activation inside an object: forwarded when navigation is
  /// captured, otherwise a plain page load.
  void follow(const ObjectId &object, const std::string &url);
  void edit(const ObjectId &object, const std::string &text, const std::string &path);

  // -- views
  bool welcomed() const noexcept { return sessionId_.has_value(); }
  const std::optional<SessionId> &session_id() const noexcept { return sessionId_; }
  const PresenceLedger &ledger() const noexcept { return ledger_; }
  const std::map<ObjectId, UIObject> &objects() const noexcept { return objects_; }
  const std::map<RuleId, Rule> &rules() const noexcept { return rules_; }
  const VirtualPage &page() const noexcept { return page_; }
  const std::vector<wire::WireMessage> &commands() const noexcept { return commands_; }
  const std::vector<wire::ErrorMsg> &errors() const noexcept { return errors_; }
  const std::vector<DomEventDescriptor> &replayed() const noexcept { return replayed_; }
  std::optional<wire::Ack> ack_for(const std::string &msgId) const;
  std::optional<wire::ErrorMsg> error_for(const std::string &msgId) const;
  bool captures(const ObjectId &object, CaptureStream stream) const;
  std::size_t count_applied(CommandAction action) const;

  /// Element of `object` on the current page, if the object is Online here.
  const PageNode *element(const ObjectId &object) const;

private:
  PageNode *element_mut(const ObjectId &object);
  bool element_found(const UIObject &obj) const;
  void apply_command(const SessionCommand &cmd);
  void navigate_to(std::string_view url, std::set<ObjectId> focus = {});
  void report_presence();
  void forget_object(const ObjectId &object);

  SessionConfig config_;
  const PageLibrary &pages_;
  bool connected_ = false;
  std::uint64_t msgCounter_ = 0;
  std::vector<wire::WireMessage> outbox_;
  std::set<std::string> seen_;

  std::optional<SessionId> sessionId_;
  std::string token_;
  std::map<ObjectId, UIObject> objects_;
  std::map<RuleId, Rule> rules_;
  PresenceLedger ledger_;

  VirtualPage page_;
  std::set<ObjectId> focus_; // non-empty after OpenUrlWithObjects
  std::map<ObjectId, PresenceState> reported_;
  std::string reportedUrl_;
  std::uint64_t presenceSeq_ = 0;

  std::set<std::pair<ObjectId, CaptureStream>> captures_;
  std::map<ObjectId, std::uint64_t> mutationSeq_;
  // Local edits not yet acknowledged, per (object, relative path). Remote
  // mutations of such a node were sequenced before our edit and are skipped.
  using EditKey = std::pair<ObjectId, std::string>;
  std::map<EditKey, std::size_t> pendingEdits_;
  std::map<std::string, EditKey> pendingMsg_; // ContentMutation msgId -> node

  std::vector<wire::WireMessage> commands_;
  std::vector<DomEventDescriptor> replayed_;
  std::vector<wire::ErrorMsg> errors_;
  std::map<std::string, wire::Ack> acks_;
  std::map<std::string, wire::ErrorMsg> errorsByMsg_;
};

} // namespace pimhub::sim
