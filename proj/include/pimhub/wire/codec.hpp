#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "pimhub/wire/json.hpp"
#include "pimhub/wire/message.hpp"

namespace pimhub::wire {

inline constexpr std::size_t kMaxFrameBytes = 1u << 20;

/// Canonical JSON: sorted keys, no whitespace, absent optionals omitted.
/// Throws Error(SchemaViolation) if `msg` breaks its kind's schema.
std::string encode(const WireMessage &msg);

/// Never throws anything but pimhub::Error with MalformedFrame, UnknownKind
/// or SchemaViolation.
WireMessage decode(std::string_view bytes);

Json to_json(const WireMessage &msg);
WireMessage from_json(const Json &frame);

/// Per-kind schema checks shared by encode and decode.
void validate(const WireMessage &msg);

/// Throws Error(AlreadySequenced) if `msg` already carries a serverSeq.
std::pair<WireMessage, std::uint64_t> assign_server_seq(WireMessage msg,
                                                        std::uint64_t counter);

/// The hub's single sequence counter.
class Sequencer {
public:
  explicit Sequencer(std::uint64_t next = 1) : next_(next) {}

  WireMessage assign(WireMessage msg) {
    auto [out, next] = assign_server_seq(std::move(msg), next_);
    next_ = next;
    return out;
  }
  std::uint64_t take() noexcept { return next_++; }
  std::uint64_t peek() const noexcept { return next_; }

private:
  std::uint64_t next_;
};

} // namespace pimhub::wire
