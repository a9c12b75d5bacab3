#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "pimhub/core/element_path.hpp"
#include "pimhub/core/ids.hpp"

namespace pimhub {

enum class DeviceKind { Desktop, Mobile, Tablet, Other };

struct DeviceInfo {
  DeviceId deviceId;
  DeviceKind kind = DeviceKind::Other;
  std::string label;

  friend bool operator==(const DeviceInfo &, const DeviceInfo &) = default;
};

enum class Stereotype {
  Generic,
  Image,
  ImageCollection,
  Text,
  Form,
  Video,
  Container,
  Page,
};

inline constexpr std::array<Stereotype, 8> kAllStereotypes{
    Stereotype::Generic, Stereotype::Image,     Stereotype::ImageCollection,
    Stereotype::Text,    Stereotype::Form,      Stereotype::Video,
    Stereotype::Container, Stereotype::Page};

std::string_view to_string(Stereotype s) noexcept;
std::optional<Stereotype> parse_stereotype(std::string_view name) noexcept;
std::string_view to_string(DeviceKind k) noexcept;
std::optional<DeviceKind> parse_device_kind(std::string_view name) noexcept;

struct Locator {
  std::string urlPattern;
  std::string elementPath;

  friend bool operator==(const Locator &, const Locator &) = default;
};

bool is_well_formed(const Locator &locator);

struct UIObject {
  ObjectId objectId;
  UserId owner;
  std::string name;
  std::set<std::string> tags;
  Stereotype stereotype = Stereotype::Generic;
  Locator locator;
  std::set<BehaviourId> enabledBehaviours;
  std::uint64_t createdAt = 0;

  friend bool operator==(const UIObject &, const UIObject &) = default;
};

struct CollectRequest {
  UserId owner;
  Locator locator;
  Stereotype stereotype = Stereotype::Generic;
  std::string name;
  std::set<std::string> tags;
};

/// Throws Error(EmptyName | MalformedLocator). The new object has no
/// behaviours attached.
UIObject collect_object(CollectRequest request, IdSequence &ids,
                        std::uint64_t createdAt);

using ObjectLookup = std::function<const UIObject *(const ObjectId &)>;

} // namespace pimhub
