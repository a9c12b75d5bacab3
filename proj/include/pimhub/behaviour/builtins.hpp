#pragma once

#include <optional>
#include <span>

#include "pimhub/behaviour/registry.hpp"

namespace pimhub::builtin {

// Ids of the behaviours every hub registers at startup.
inline const BehaviourId kShowOnlyIn{"ShowOnlyIn"};
inline const BehaviourId kRedirectInteraction{"RedirectInteraction"};
inline const BehaviourId kControlNavigation{"ControlNavigation"};
inline const BehaviourId kOpenIn{"OpenIn"};
inline const BehaviourId kMirrorContent{"MirrorContent"};
inline const BehaviourId kRemoteEffect{"RemoteEffect"};
inline const BehaviourId kPlayVideoOn{"PlayVideoOn"};

void register_builtins(BehaviourRegistry &registry);

// Direct planner entry points. Each throws pimhub::Error with the code named
// in its comment; all of them treat sessions that are not live or belong to
// another user as unknown.

/// Hide at every session where the object is Online except `target`, then
/// Show at `target`. UnknownSession.
Plan plan_show_only_in(const UIObject &object, const SessionId &target,
                       const PresenceLedger &ledger);

/// Capture(Dom) at `source` plus a Redirect route. SameSession, UnknownSession.
Plan plan_redirect_interaction(const UIObject &object, const SessionId &source,
                               const SessionId &target,
                               const PresenceLedger &ledger);

/// Hide at the controlled session, ShowOnly + Capture(Navigation) at the
/// controller, plus a Navigation route. Without `controlled`, the lowest
/// other session where the object is Online is used.
/// SameSession, UnknownSession, ObjectOffline.
Plan plan_control_navigation(const UIObject &object, const SessionId &controller,
                             const std::optional<SessionId> &controlled,
                             const PresenceLedger &ledger);

/// One OpenUrlWithObjects to the lowest live session of `device`. The URL is
/// the current URL of `origin` (or else of the lowest session) that every
/// object's pattern matches. EmptyObjectList, NoLiveSession, MixedOrigins.
Plan plan_open_in(std::span<const UIObject> objects, const DeviceId &device,
                  const PresenceLedger &ledger,
                  const std::optional<SessionId> &origin = std::nullopt);

/// Capture(Mutation) at each session where the object is Online, plus a
/// Mirror route. ObjectOffline.
Plan plan_mirror_content(const UIObject &object, const PresenceLedger &ledger);

/// ObjectOffline, UnknownSession.
Plan plan_remote_effect(const UIObject &object, Effect effect,
                        const SessionId &target, const PresenceLedger &ledger);

/// StereotypeMismatch (checked first), ObjectOffline, UnknownSession.
Plan plan_media_control(const UIObject &object, MediaVerb verb,
                        const SessionId &target, const PresenceLedger &ledger);

} // namespace pimhub::builtin
