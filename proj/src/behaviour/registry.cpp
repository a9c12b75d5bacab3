#include "pimhub/behaviour/registry.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include "pimhub/core/error.hpp"

namespace pimhub {

std::string_view to_string(RouteKind k) noexcept {
  switch (k) {
  case RouteKind::Redirect:
    return "Redirect";
  case RouteKind::Navigation:
    return "Navigation";
  case RouteKind::Mirror:
    return "Mirror";
  }
  return "?";
}

void validate_param_specs(const std::vector<ParameterSpec> &params) {
  std::set<std::string> seen;
  for (const auto &p : params) {
    if (p.name.empty())
      throw Error(Errc::InvalidParamSpec, "parameter without a name");
    if (!seen.insert(p.name).second)
      throw Error(Errc::InvalidParamSpec, "duplicate parameter '" + p.name + "'");
    if (p.kind == ParamKind::Enum && p.options.empty())
      throw Error(Errc::InvalidParamSpec, "enum '" + p.name + "' has no options");
    if (p.kind != ParamKind::Enum && !p.options.empty())
      throw Error(Errc::InvalidParamSpec, "options on non-enum '" + p.name + "'");
  }
}

void validate_bindings(const BehaviourMeta &meta, const Bindings &bindings) {
  for (const auto &spec : meta.params) {
    auto it = bindings.find(spec.name);
    if (it == bindings.end()) {
      if (spec.required)
        throw Error(Errc::MissingParam, spec.name);
      continue;
    }
    const auto &value = it->second;
    const bool countOk =
        spec.repeated ? !value.values.empty() : value.values.size() == 1;
    if (value.kind != spec.kind || !countOk)
      throw Error(Errc::KindMismatch, spec.name);
    for (const auto &v : value.values) {
      if (v.empty() && spec.kind != ParamKind::Text)
        throw Error(Errc::KindMismatch, spec.name);
      if (spec.kind == ParamKind::Enum &&
          std::find(spec.options.begin(), spec.options.end(), v) ==
              spec.options.end())
        throw Error(Errc::KindMismatch, spec.name);
    }
  }
}

BehaviourId BehaviourRegistry::register_descriptor(BehaviourDescriptor descriptor) {
  if (descriptor.meta.id.empty())
    throw Error(Errc::InvalidDescriptor, "behaviour id is empty");
  validate_param_specs(descriptor.meta.params);
  std::unique_lock lock(mutex_);
  for (const auto &d : descriptors_)
    if (d.meta.id == descriptor.meta.id)
      throw Error(Errc::DuplicateId, descriptor.meta.id.str());
  descriptors_.push_back(std::move(descriptor));
  return descriptors_.back().meta.id;
}

const BehaviourDescriptor *BehaviourRegistry::lookup(const BehaviourId &id) const {
  std::shared_lock lock(mutex_);
  for (const auto &d : descriptors_)
    if (d.meta.id == id)
      return &d;
  return nullptr;
}

std::vector<const BehaviourDescriptor *>
BehaviourRegistry::lookup_applicable(Stereotype s) const {
  std::shared_lock lock(mutex_);
  std::vector<const BehaviourDescriptor *> out;
  for (const auto &d : descriptors_)
    if (d.meta.applicability.applies_to(s))
      out.push_back(&d);
  return out;
}

std::vector<const BehaviourDescriptor *> BehaviourRegistry::all() const {
  std::shared_lock lock(mutex_);
  std::vector<const BehaviourDescriptor *> out;
  for (const auto &d : descriptors_)
    out.push_back(&d);
  return out;
}

std::size_t BehaviourRegistry::size() const {
  std::shared_lock lock(mutex_);
  return descriptors_.size();
}

UIObject attach_behaviour(UIObject object, const BehaviourMeta &meta) {
  if (!meta.applicability.applies_to(object.stereotype))
    throw Error(Errc::StereotypeMismatch,
                meta.id.str() + " does not apply to " +
                    std::string(to_string(object.stereotype)));
  object.enabledBehaviours.insert(meta.id);
  return object;
}

UIObject attach_behaviour(UIObject object, const BehaviourId &behaviour,
                          const BehaviourRegistry &registry) {
  const auto *d = registry.lookup(behaviour);
  if (!d)
    throw Error(Errc::UnknownBehaviour, behaviour.str());
  return attach_behaviour(std::move(object), d->meta);
}

} // namespace pimhub
