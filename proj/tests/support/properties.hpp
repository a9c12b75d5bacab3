#pragma once

// Randomized properties shared by the unit suites and the acceptance binary.

#include <cstdint>
#include <string>

namespace testsupport {

struct PropertyResult {
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::size_t positives = 0; // firings / satisfied conditions seen, so a match is not vacuous
  std::string first; // description of the first failure

  bool ok() const { return checked > 0 && failures == 0; }
};

/// Random rule sets and ledger event sequences (<= 4 sessions, <= 3 objects,
/// <= 3 predicates per rule). After every event the engine's invocations must
/// equal the naive re-evaluating interpreter's, rule ids and witnesses alike.
PropertyResult rule_engine_equivalence(std::uint64_t seed, std::size_t instances);

/// Condition evaluation alone versus exhaustive assignment search.
PropertyResult condition_equivalence(std::uint64_t seed, std::size_t instances);

/// Random presence update sets of 1..maxUpdates updates; every ordering
/// (exhaustive up to 5, sampled above) must give the same ledger.
PropertyResult ledger_permutations(std::uint64_t seed, std::size_t sets,
                                   std::size_t maxUpdates = 8);

/// `mutations` random PIM mutations through the hub, restart over the same
/// store, compare restored durable state structurally. Uses a FileStore
/// under `dir` when non-empty, else a MemoryStore.
PropertyResult restart_durability(std::uint64_t seed, std::size_t mutations,
                                  const std::string &dir = {});

} // namespace testsupport
