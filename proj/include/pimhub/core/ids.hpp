#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>

namespace pimhub {

/// Opaque string identifier, distinct per tag so a SessionId never passes for an ObjectId.
template <typename Tag>
class Id {
public:
  Id() = default;
  explicit Id(std::string value) : value_(std::move(value)) {}

  const std::string &str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const Id &, const Id &) = default;
  friend bool operator==(const Id &, const Id &) = default;

private:
  std::string value_;
};

using UserId = Id<struct UserTag>;
using DeviceId = Id<struct DeviceTag>;
using SessionId = Id<struct SessionTag>;
using ObjectId = Id<struct ObjectTag>;
using RuleId = Id<struct RuleTag>;
using BehaviourId = Id<struct BehaviourTag>;

/// Monotone id generator: prefix + zero-padded counter, so lexicographic
/// order follows issue order for the first 10^6 ids.
class IdSequence {
public:
  explicit IdSequence(std::string prefix, std::uint64_t next = 1)
      : prefix_(std::move(prefix)), next_(next) {}

  template <typename IdT>
  IdT next() {
    return IdT(format(next_++));
  }

  std::uint64_t peek() const noexcept { return next_; }
  void reset(std::uint64_t next) noexcept { next_ = next; }

private:
  std::string format(std::uint64_t n) const {
    std::string digits = std::to_string(n);
    if (digits.size() < 6)
      digits.insert(0, 6 - digits.size(), '0');
    return prefix_ + digits;
  }

  std::string prefix_;
  std::uint64_t next_;
};

} // namespace pimhub

template <typename Tag>
struct std::hash<pimhub::Id<Tag>> {
  std::size_t operator()(const pimhub::Id<Tag> &id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
