#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pimhub/sim/simulator.hpp"

namespace pimhub::sim {

struct SweepOptions {
  std::uint64_t seeds = 100;
  std::uint64_t firstSeed = 1;
  /// >0 adds a second run per seed with duplicate delivery whose end state
  /// must match the clean run.
  double dupRate = 0.0;
  bool brokenDedupe = false;
  /// Violating seeds that get a minimized trace (minimizing is quadratic).
  std::size_t minimize = 3;
};

struct SweepViolation {
  std::uint64_t seed = 0;
  std::string message;
  /// Shortest step prefix that still fails; 0 when not minimized.
  std::size_t minimizedSteps = 0;
  Trace trace;
};

struct SweepReport {
  std::size_t runs = 0;
  std::vector<SweepViolation> violations;
  double seconds = 0;
};

SweepReport sweep_interleavings(const Scenario &scenario, const SweepOptions &options);

} // namespace pimhub::sim
