#pragma once

#include <vector>

#include "pimhub/behaviour/registry.hpp"

namespace oracle {

using namespace pimhub;

/// Linear filter over everything registered, in registration order.
inline std::vector<BehaviourId> applicable(const std::vector<BehaviourMeta> &registered,
                                           Stereotype s) {
  std::vector<BehaviourId> out;
  for (const auto &m : registered)
    if (m.applicability.agnostic || m.applicability.stereotypes.count(s))
      out.push_back(m.id);
  return out;
}

/// Accepted iff every required name is bound with the declared kind.
inline bool bindings_acceptable(const std::vector<ParameterSpec> &params,
                                const Bindings &b) {
  for (const auto &p : params) {
    auto it = b.find(p.name);
    if (it == b.end()) {
      if (p.required)
        return false;
      continue;
    }
    if (it->second.kind != p.kind)
      return false;
  }
  return true;
}

} // namespace oracle
