#pragma once

#include <deque>
#include <shared_mutex>
#include <vector>

#include "pimhub/behaviour/descriptor.hpp"

namespace pimhub {

/// Throws Error(InvalidParamSpec) on empty or duplicate names, or an Enum
/// without options.
void validate_param_specs(const std::vector<ParameterSpec> &params);

/// Throws Error(MissingParam) or Error(KindMismatch); the parameter name is
/// the error message. Bindings for names the behaviour does not declare are
/// ignored.
void validate_bindings(const BehaviourMeta &meta, const Bindings &bindings);

/// Descriptors in registration order. Lookups may run concurrently with each
/// other; registration takes the writer lock. Returned pointers stay valid
/// for the registry's lifetime.
class BehaviourRegistry {
public:
  BehaviourRegistry() = default;
  BehaviourRegistry(const BehaviourRegistry &) = delete;
  BehaviourRegistry &operator=(const BehaviourRegistry &) = delete;

  /// Throws Error(DuplicateId) or Error(InvalidParamSpec).
  BehaviourId register_descriptor(BehaviourDescriptor descriptor);

  const BehaviourDescriptor *lookup(const BehaviourId &id) const;

  /// Agnostic descriptors plus those specific to `s`, in registration order.
  std::vector<const BehaviourDescriptor *> lookup_applicable(Stereotype s) const;

  std::vector<const BehaviourDescriptor *> all() const;
  std::size_t size() const;

private:
  mutable std::shared_mutex mutex_;
  std::deque<BehaviourDescriptor> descriptors_;
};

/// Adds `meta.id` to the object's enabled behaviours.
/// Throws Error(StereotypeMismatch) if the behaviour is stereotype-specific
/// and does not cover the object's stereotype.
UIObject attach_behaviour(UIObject object, const BehaviourMeta &meta);

/// Throws Error(UnknownBehaviour) if `behaviour` is not registered.
UIObject attach_behaviour(UIObject object, const BehaviourId &behaviour,
                          const BehaviourRegistry &registry);

} // namespace pimhub
