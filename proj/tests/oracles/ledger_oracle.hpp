#pragma once

// Ledger references: the expected final ledger of an update set is, per key,
// the record with the highest seq. Applying every ordering must agree with it.

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "pimhub/core/presence.hpp"

namespace oracle {

using namespace pimhub;

inline std::map<PresenceLedger::Key, PresenceRecord>
expected_records(const std::vector<PresenceRecord> &updates) {
  std::map<PresenceLedger::Key, PresenceRecord> best;
  for (const auto &u : updates) {
    auto key = std::make_pair(u.objectId, u.sessionId);
    auto it = best.find(key);
    if (it == best.end() || u.seq > it->second.seq)
      best[key] = u;
  }
  return best;
}

inline PresenceLedger fold(PresenceLedger base, const std::vector<PresenceRecord> &updates,
                           const std::vector<std::size_t> &order) {
  for (std::size_t i : order)
    base.apply(updates[i]);
  return base;
}

/// Every ordering for small sets, `samples` random ones otherwise. Returns
/// the number of orderings whose result differs from the reference.
inline std::size_t permutation_mismatches(const PresenceLedger &base,
                                          const std::vector<PresenceRecord> &updates,
                                          std::mt19937_64 &rng,
                                          std::size_t exhaustiveUpTo = 5,
                                          std::size_t samples = 200) {
  const auto want = expected_records(updates);
  std::vector<std::size_t> order(updates.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;

  std::size_t bad = 0;
  auto check = [&] {
    PresenceLedger got = fold(base, updates, order);
    for (const auto &[key, rec] : want) {
      const PresenceRecord *r = got.record(key.first, key.second);
      if (!r || !(*r == rec)) {
        ++bad;
        return;
      }
    }
  };
  if (updates.size() <= exhaustiveUpTo) {
    do
      check();
    while (std::next_permutation(order.begin(), order.end()));
  } else {
    for (std::size_t n = 0; n < samples; ++n) {
      std::shuffle(order.begin(), order.end(), rng);
      check();
    }
  }
  return bad;
}

} // namespace oracle
