#include "pimhub/behaviour/builtins.hpp"

#include <algorithm>

#include "pimhub/core/error.hpp"
#include "pimhub/core/url.hpp"

namespace pimhub::builtin {
namespace {

void require_live_owned(const PresenceLedger &ledger, const SessionId &s,
                        const UserId &owner) {
  const auto *entry = ledger.session(s);
  if (!entry || !entry->live || entry->user != owner)
    throw Error(Errc::UnknownSession, s.str());
}

bool online_at(const PresenceLedger &ledger, const UIObject &object,
               const SessionId &s) {
  return ledger.state(object.objectId, s) == PresenceState::Online;
}

// --- binding helpers for the registered planners ---

const BindingValue *find(const PlanRequest &req, const char *name) {
  auto it = req.bindings.find(name);
  return it == req.bindings.end() ? nullptr : &it->second;
}

const UIObject &object_arg(const PlanRequest &req, const std::string &id) {
  const UIObject *object = req.objects ? req.objects(ObjectId(id)) : nullptr;
  if (!object)
    throw Error(Errc::UnknownObject, id);
  if (object->owner != req.owner)
    throw Error(Errc::NotOwner, id);
  return *object;
}

const UIObject &object_param(const PlanRequest &req, const char *name) {
  const auto *v = find(req, name);
  if (!v)
    throw Error(Errc::MissingParam, name);
  return object_arg(req, v->single());
}

SessionId session_param(const PlanRequest &req, const char *name) {
  const auto *v = find(req, name);
  if (!v)
    throw Error(Errc::MissingParam, name);
  return SessionId(v->single());
}

std::optional<std::string> text_param(const PlanRequest &req, const char *name) {
  const auto *v = find(req, name);
  return v ? std::optional<std::string>(v->single()) : std::nullopt;
}

ParameterSpec param(std::string name, ParamKind kind, bool required = true) {
  return ParameterSpec{std::move(name), kind, required, false, {}};
}

ParameterSpec enum_param(std::string name, std::vector<std::string> options,
                         bool required = true) {
  return ParameterSpec{std::move(name), ParamKind::Enum, required, false,
                       std::move(options)};
}

BehaviourDescriptor descriptor(const BehaviourId &id, std::string display,
                               Applicability applicability,
                               std::vector<ParameterSpec> params, Planner planner) {
  BehaviourDescriptor d;
  d.meta = BehaviourMeta{id, std::move(display), std::move(applicability),
                         std::move(params)};
  d.planner = std::move(planner);
  d.repo = RepoMeta{UserId("system"), false, false, true};
  return d;
}

} // namespace

Plan plan_show_only_in(const UIObject &object, const SessionId &target,
                       const PresenceLedger &ledger) {
  require_live_owned(ledger, target, object.owner);
  Plan plan;
  for (const auto &s : ledger.online_sessions(object.objectId, object.owner))
    if (s != target)
      plan.commands.push_back(
          object_command(s, CommandAction::Hide, object.objectId));
  plan.commands.push_back(
      object_command(target, CommandAction::Show, object.objectId));
  return plan;
}

Plan plan_redirect_interaction(const UIObject &object, const SessionId &source,
                               const SessionId &target,
                               const PresenceLedger &ledger) {
  if (source == target)
    throw Error(Errc::SameSession, source.str());
  require_live_owned(ledger, source, object.owner);
  require_live_owned(ledger, target, object.owner);
  Plan plan;
  auto capture = object_command(source, CommandAction::Capture, object.objectId);
  capture.stream = CaptureStream::Dom;
  plan.commands.push_back(std::move(capture));
  plan.routes.push_back(
      Route{RouteKind::Redirect, object.owner, object.objectId, source, target});
  return plan;
}

Plan plan_control_navigation(const UIObject &object, const SessionId &controller,
                             const std::optional<SessionId> &controlled,
                             const PresenceLedger &ledger) {
  require_live_owned(ledger, controller, object.owner);
  SessionId target;
  if (controlled) {
    if (*controlled == controller)
      throw Error(Errc::SameSession, controller.str());
    require_live_owned(ledger, *controlled, object.owner);
    if (!online_at(ledger, object, *controlled))
      throw Error(Errc::ObjectOffline,
                  object.objectId.str() + " at " + controlled->str());
    target = *controlled;
  } else {
    for (const auto &s : ledger.online_sessions(object.objectId, object.owner))
      if (s != controller) {
        target = s;
        break;
      }
    if (target.empty())
      throw Error(Errc::ObjectOffline, object.objectId.str());
  }

  Plan plan;
  plan.commands.push_back(
      object_command(target, CommandAction::Hide, object.objectId));
  plan.commands.push_back(
      object_command(controller, CommandAction::ShowOnly, object.objectId));
  auto capture =
      object_command(controller, CommandAction::Capture, object.objectId);
  capture.stream = CaptureStream::Navigation;
  plan.commands.push_back(std::move(capture));
  plan.routes.push_back(Route{RouteKind::Navigation, object.owner,
                              object.objectId, controller, target});
  return plan;
}

Plan plan_open_in(std::span<const UIObject> objects, const DeviceId &device,
                  const PresenceLedger &ledger,
                  const std::optional<SessionId> &origin) {
  if (objects.empty())
    throw Error(Errc::EmptyObjectList, "OpenIn needs at least one object");
  const UserId &owner = objects.front().owner;

  SessionId target;
  for (const auto &s : ledger.live_sessions(owner))
    if (ledger.session(s)->device.deviceId == device) {
      target = s;
      break;
    }
  if (target.empty())
    throw Error(Errc::NoLiveSession, device.str());

  auto matches_all = [&](const std::string &url) {
    return !url.empty() &&
           std::all_of(objects.begin(), objects.end(), [&](const UIObject &o) {
             return url_pattern_matches(o.locator.urlPattern, url);
           });
  };
  std::vector<SessionId> candidates;
  if (origin && ledger.is_live(*origin) && ledger.session(*origin)->user == owner)
    candidates.push_back(*origin);
  for (const auto &s : ledger.live_sessions(owner))
    candidates.push_back(s);

  std::optional<std::string> url;
  for (const auto &s : candidates) {
    const auto &current = ledger.session(s)->currentUrl;
    if (matches_all(current)) {
      url = current;
      break;
    }
  }
  if (!url)
    throw Error(Errc::MixedOrigins, "no open URL matches every object");

  SessionCommand cmd;
  cmd.target = target;
  cmd.action = CommandAction::OpenUrlWithObjects;
  cmd.url = *url;
  for (const auto &o : objects)
    cmd.objects.push_back(o.objectId);
  Plan plan;
  plan.commands.push_back(std::move(cmd));
  return plan;
}

Plan plan_mirror_content(const UIObject &object, const PresenceLedger &ledger) {
  const auto online = ledger.online_sessions(object.objectId, object.owner);
  if (online.empty())
    throw Error(Errc::ObjectOffline, object.objectId.str());
  Plan plan;
  for (const auto &s : online) {
    auto capture = object_command(s, CommandAction::Capture, object.objectId);
    capture.stream = CaptureStream::Mutation;
    plan.commands.push_back(std::move(capture));
  }
  plan.routes.push_back(Route{RouteKind::Mirror, object.owner, object.objectId,
                              SessionId{}, SessionId{}});
  return plan;
}

Plan plan_remote_effect(const UIObject &object, Effect effect,
                        const SessionId &target, const PresenceLedger &ledger) {
  require_live_owned(ledger, target, object.owner);
  if (!online_at(ledger, object, target))
    throw Error(Errc::ObjectOffline, object.objectId.str() + " at " + target.str());
  auto cmd = object_command(target, CommandAction::ApplyEffect, object.objectId);
  cmd.effect = effect;
  return Plan{{std::move(cmd)}, {}};
}

Plan plan_media_control(const UIObject &object, MediaVerb verb,
                        const SessionId &target, const PresenceLedger &ledger) {
  if (object.stereotype != Stereotype::Video)
    throw Error(Errc::StereotypeMismatch, object.objectId.str() + " is not a Video");
  require_live_owned(ledger, target, object.owner);
  if (!online_at(ledger, object, target))
    throw Error(Errc::ObjectOffline, object.objectId.str() + " at " + target.str());
  auto cmd = object_command(target, CommandAction::MediaControl, object.objectId);
  cmd.media = verb;
  return Plan{{std::move(cmd)}, {}};
}

void register_builtins(BehaviourRegistry &registry) {
  registry.register_descriptor(descriptor(
      kShowOnlyIn, "Show only in...", Applicability::any(),
      {param("object", ParamKind::ObjectRef), param("target", ParamKind::SessionRef)},
      [](const PlanRequest &r) {
        return plan_show_only_in(object_param(r, "object"),
                                 session_param(r, "target"), r.ledger);
      }));

  registry.register_descriptor(descriptor(
      kRedirectInteraction, "Redirect interaction to...", Applicability::any(),
      {param("object", ParamKind::ObjectRef), param("source", ParamKind::SessionRef),
       param("target", ParamKind::SessionRef)},
      [](const PlanRequest &r) {
        return plan_redirect_interaction(object_param(r, "object"),
                                         session_param(r, "source"),
                                         session_param(r, "target"), r.ledger);
      }));

  registry.register_descriptor(descriptor(
      kControlNavigation, "Control navigation from...", Applicability::any(),
      {param("controlsBy", ParamKind::ObjectRef),
       param("controlsFrom", ParamKind::SessionRef),
       param("controlled", ParamKind::SessionRef, false)},
      [](const PlanRequest &r) {
        std::optional<SessionId> controlled;
        if (auto v = text_param(r, "controlled"))
          controlled = SessionId(*v);
        return plan_control_navigation(object_param(r, "controlsBy"),
                                       session_param(r, "controlsFrom"),
                                       controlled, r.ledger);
      }));

  {
    auto objects = param("objects", ParamKind::ObjectRef);
    objects.repeated = true;
    registry.register_descriptor(descriptor(
        kOpenIn, "Open in...", Applicability::any(),
        {objects, param("device", ParamKind::DeviceRef)},
        [](const PlanRequest &r) {
          std::vector<UIObject> list;
          if (const auto *v = find(r, "objects"))
            for (const auto &id : v->values)
              list.push_back(object_arg(r, id));
          const auto *dev = find(r, "device");
          if (!dev)
            throw Error(Errc::MissingParam, "device");
          return plan_open_in(list, DeviceId(dev->single()), r.ledger, r.origin);
        }));
  }

  registry.register_descriptor(descriptor(
      kMirrorContent, "Mirror content", Applicability::any(),
      {param("object", ParamKind::ObjectRef)}, [](const PlanRequest &r) {
        return plan_mirror_content(object_param(r, "object"), r.ledger);
      }));

  registry.register_descriptor(descriptor(
      kRemoteEffect, "Remote UI effect in...", Applicability::any(),
      {param("object", ParamKind::ObjectRef),
       enum_param("effect", {"Highlight", "Hide", "Focus"}),
       param("target", ParamKind::SessionRef)},
      [](const PlanRequest &r) {
        return plan_remote_effect(object_param(r, "object"),
                                  *parse_effect(*text_param(r, "effect")),
                                  session_param(r, "target"), r.ledger);
      }));

  registry.register_descriptor(descriptor(
      kPlayVideoOn, "Play video on...", Applicability::only({Stereotype::Video}),
      {param("object", ParamKind::ObjectRef), enum_param("verb", {"Play", "Stop"}, false),
       param("target", ParamKind::SessionRef)},
      [](const PlanRequest &r) {
        const auto verb = text_param(r, "verb").value_or("Play");
        return plan_media_control(object_param(r, "object"), *parse_media_verb(verb),
                                  session_param(r, "target"), r.ledger);
      }));
}

} // namespace pimhub::builtin
