#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "pimhub/wire/message.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

inline std::uint64_t pick(Rng &rng, std::uint64_t n) { return rng() % n; }
inline bool coin(Rng &rng) { return rng() & 1u; }

std::string random_text(Rng &rng, std::size_t maxLen = 12);
pimhub::UIObject random_object(Rng &rng);
pimhub::Rule random_rule_shape(Rng &rng);
pimhub::SessionCommand random_command(Rng &rng);

/// A message of a random kind that satisfies its schema.
pimhub::wire::WireMessage random_message(Rng &rng);

} // namespace testsupport
