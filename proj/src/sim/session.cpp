#include "pimhub/sim/session.hpp"

#include <algorithm>

#include "pimhub/core/error.hpp"
#include "pimhub/core/url.hpp"

namespace pimhub::sim {

using namespace wire;

VirtualSession::VirtualSession(SessionConfig config, const PageLibrary &pages)
    : config_(std::move(config)), pages_(pages) {}

void VirtualSession::connect() {
  connected_ = true;
  sessionId_.reset();
  seen_.clear();
  captures_.clear();
  pendingEdits_.clear();
  pendingMsg_.clear();
  send(Hello{config_.user, config_.password, config_.device, true});
}

std::vector<WireMessage> VirtualSession::take_outbox() {
  std::vector<WireMessage> out;
  out.swap(outbox_);
  return out;
}

std::string VirtualSession::send(Payload payload) {
  if (!connected_)
    return {};
  WireMessage msg{config_.alias + "." + std::to_string(++msgCounter_), std::nullopt,
                  std::move(payload)};
  auto id = msg.msgId;
  outbox_.push_back(std::move(msg));
  return id;
}

std::optional<Ack> VirtualSession::ack_for(const std::string &msgId) const {
  auto it = acks_.find(msgId);
  if (it == acks_.end())
    return std::nullopt;
  return it->second;
}

std::optional<ErrorMsg> VirtualSession::error_for(const std::string &msgId) const {
  auto it = errorsByMsg_.find(msgId);
  if (it == errorsByMsg_.end())
    return std::nullopt;
  return it->second;
}

bool VirtualSession::captures(const ObjectId &object, CaptureStream stream) const {
  return captures_.contains({object, stream});
}

std::size_t VirtualSession::count_applied(CommandAction action) const {
  return std::count_if(commands_.begin(), commands_.end(), [&](const WireMessage &m) {
    return m.as<SessionCommandMsg>()->command.action == action;
  });
}

bool VirtualSession::element_found(const UIObject &obj) const {
  if (!focus_.empty() && !focus_.contains(obj.objectId))
    return false;
  if (!url_pattern_matches(obj.locator.urlPattern, page_.url))
    return false;
  auto path = parse_element_path(obj.locator.elementPath);
  return path && resolve_path(*path, page_.root) != nullptr;
}

const PageNode *VirtualSession::element(const ObjectId &object) const {
  auto it = objects_.find(object);
  if (it == objects_.end() || !element_found(it->second))
    return nullptr;
  return resolve_path(*parse_element_path(it->second.locator.elementPath), page_.root);
}

PageNode *VirtualSession::element_mut(const ObjectId &object) {
  return const_cast<PageNode *>(element(object));
}

// ---------------------------------------------------------------------------

void VirtualSession::deliver(const WireMessage &msg) {
  if (config_.dedupe && !seen_.insert(msg.msgId).second)
    return;
  std::visit(
      [&](const auto &p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Welcome>) {
          sessionId_ = p.session;
          token_ = p.token;
          objects_.clear();
          for (const auto &o : p.pim.objects)
            objects_.emplace(o.objectId, o);
          rules_.clear();
          for (const auto &r : p.pim.rules)
            rules_.emplace(r.ruleId, r);
          ledger_ = PresenceLedger{};
          for (const auto &s : p.ledger.sessions)
            ledger_.upsert_session(s);
          for (const auto &r : p.ledger.records)
            ledger_.apply(r);
          reported_.clear();
          reportedUrl_.clear();
          report_presence();
        } else if constexpr (std::is_same_v<T, UpdateObject>) {
          objects_[p.object.objectId] = p.object;
          report_presence();
        } else if constexpr (std::is_same_v<T, DeleteObject>) {
          forget_object(p.object);
        } else if constexpr (std::is_same_v<T, DefineRule>) {
          rules_[p.rule.ruleId] = p.rule;
        } else if constexpr (std::is_same_v<T, DeleteRule>) {
          rules_.erase(p.rule);
        } else if constexpr (std::is_same_v<T, PresenceUpdate>) {
          for (const auto &s : p.sessions)
            ledger_.upsert_session(s);
          for (const auto &r : p.records)
            ledger_.apply(r);
        } else if constexpr (std::is_same_v<T, SessionCommandMsg>) {
          commands_.push_back(msg);
          apply_command(p.command);
        } else if constexpr (std::is_same_v<T, Ack>) {
          acks_[p.ackOf] = p;
          if (auto it = pendingMsg_.find(p.ackOf); it != pendingMsg_.end()) {
            --pendingEdits_[it->second];
            pendingMsg_.erase(it);
          }
        } else if constexpr (std::is_same_v<T, ErrorMsg>) {
          errors_.push_back(p);
          if (p.ackOf) {
            errorsByMsg_[*p.ackOf] = p;
            if (auto it = pendingMsg_.find(*p.ackOf); it != pendingMsg_.end()) {
              --pendingEdits_[it->second];
              pendingMsg_.erase(it);
            }
          }
        }
      },
      msg.payload);
}

void VirtualSession::apply_command(const SessionCommand &cmd) {
  PageNode *el = cmd.objectId ? element_mut(*cmd.objectId) : nullptr;
  switch (cmd.action) {
  case CommandAction::Hide:
    if (el)
      el->hidden = true;
    break;
  case CommandAction::Show:
    if (el)
      el->hidden = false;
    break;
  case CommandAction::ShowOnly:
    if (el) {
      // hide every sibling along the ancestor chain, keep the chain itself
      auto chain = ancestor_chain(page_.root, el);
      for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        for (auto &c : chain[i]->children)
          c.hidden = &c != chain[i + 1];
      el->hidden = false;
    }
    break;
  case CommandAction::Navigate:
    navigate_to(*cmd.url);
    break;
  case CommandAction::ReplayEvent:
    replayed_.push_back(*cmd.event);
    break;
  case CommandAction::ApplyMutation: {
    const auto &m = *cmd.mutation;
    if (pendingEdits_[{m.objectId, m.relativeTargetPath}] > 0)
      break; // our own later edit is still in flight and will win
    if (!el)
      break;
    auto rel = parse_relative_path(m.relativeTargetPath);
    PageNode *target = rel ? resolve_path(*rel, *el) : nullptr;
    if (target && m.newText)
      target->text = *m.newText;
    report_presence();
    break;
  }
  case CommandAction::OpenUrlWithObjects:
    navigate_to(*cmd.url, std::set<ObjectId>(cmd.objects.begin(), cmd.objects.end()));
    break;
  case CommandAction::ApplyEffect:
    if (el && cmd.effect == Effect::Hide)
      el->hidden = true;
    break;
  case CommandAction::MediaControl:
    break;
  case CommandAction::Capture:
    captures_.insert({*cmd.objectId, *cmd.stream});
    break;
  }
}

void VirtualSession::navigate_to(std::string_view url, std::set<ObjectId> focus) {
  page_ = pages_.load(url);
  focus_ = std::move(focus);
  report_presence();
}

void VirtualSession::load(std::string_view url) { navigate_to(url); }

void VirtualSession::report_presence() {
  if (!connected_ || !sessionId_)
    return;
  PresenceUpdate upd;
  if (!page_.url.empty() && page_.url != reportedUrl_) {
    reportedUrl_ = page_.url;
    upd.url = page_.url;
    if (const auto *self = ledger_.session(*sessionId_)) {
      auto entry = *self;
      entry.currentUrl = page_.url;
      ledger_.upsert_session(entry);
    }
  }
  for (const auto &[id, obj] : objects_) {
    auto st = resolve_presence(obj, page_.url, element_found(obj));
    auto prev = reported_.find(id);
    if ((prev == reported_.end() ? PresenceState::Offline : prev->second) == st)
      continue;
    PresenceRecord rec{id, *sessionId_, st, ++presenceSeq_};
    ledger_.apply(rec);
    reported_[id] = st;
    upd.records.push_back(rec);
  }
  if (upd.url || !upd.records.empty())
    send(std::move(upd));
}

void VirtualSession::forget_object(const ObjectId &object) {
  objects_.erase(object);
  ledger_.erase_object(object);
  reported_.erase(object);
  std::erase_if(captures_, [&](const auto &c) { return c.first == object; });
}

void VirtualSession::click(const ObjectId &object, const std::string &path,
                           const std::string &type) {
  if (!element(object))
    throw Error(Errc::ScenarioError, object.str() + " is not on the page of " + alias());
  if (captures(object, CaptureStream::Dom))
    send(DomEvent{DomEventDescriptor{object, type, path, std::nullopt}});
}

void VirtualSession::follow(const ObjectId &object, const std::string &url) {
  if (!element(object))
    throw Error(Errc::ScenarioError, object.str() + " is not on the page of " + alias());
  if (captures(object, CaptureStream::Navigation))
    send(NavigationCommand{object, url});
  else
    navigate_to(url);
}

void VirtualSession::edit(const ObjectId &object, const std::string &text,
                          const std::string &path) {
  PageNode *el = element_mut(object);
  if (!el)
    throw Error(Errc::ScenarioError, object.str() + " is not on the page of " + alias());
  auto rel = parse_relative_path(path);
  PageNode *target = rel ? resolve_path(*rel, *el) : nullptr;
  if (!target)
    throw Error(Errc::ScenarioError, "no node at " + path + " inside " + object.str());
  target->text = text;
  if (captures(object, CaptureStream::Mutation)) {
    ContentMutationDescriptor m{object, path, text, std::nullopt, std::nullopt,
                                ++mutationSeq_[object]};
    auto id = send(ContentMutation{m});
    ++pendingEdits_[{object, path}];
    pendingMsg_[id] = {object, path};
  }
  report_presence();
}

} // namespace pimhub::sim
