#include "pimhub/core/model.hpp"

#include <utility>

#include "pimhub/core/error.hpp"
#include "pimhub/core/url.hpp"

namespace pimhub {
namespace {

constexpr std::array<std::string_view, 8> kStereotypeNames{
    "Generic", "Image", "ImageCollection", "Text",
    "Form",    "Video", "Container",       "Page"};

constexpr std::array<std::string_view, 4> kDeviceKindNames{
    "Desktop", "Mobile", "Tablet", "Other"};

} // namespace

std::string_view to_string(Stereotype s) noexcept {
  return kStereotypeNames[static_cast<std::size_t>(s)];
}

std::optional<Stereotype> parse_stereotype(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kStereotypeNames.size(); ++i)
    if (kStereotypeNames[i] == name)
      return static_cast<Stereotype>(i);
  return std::nullopt;
}

std::string_view to_string(DeviceKind k) noexcept {
  return kDeviceKindNames[static_cast<std::size_t>(k)];
}

std::optional<DeviceKind> parse_device_kind(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kDeviceKindNames.size(); ++i)
    if (kDeviceKindNames[i] == name)
      return static_cast<DeviceKind>(i);
  return std::nullopt;
}

bool is_well_formed(const Locator &locator) {
  return is_valid_url_pattern(locator.urlPattern) &&
         parse_element_path(locator.elementPath).has_value();
}

UIObject collect_object(CollectRequest request, IdSequence &ids,
                        std::uint64_t createdAt) {
  if (request.name.empty())
    throw Error(Errc::EmptyName, "object name must not be empty");
  if (!is_well_formed(request.locator))
    throw Error(Errc::MalformedLocator, "'" + request.locator.urlPattern +
                                            "' / '" +
                                            request.locator.elementPath + "'");
  UIObject object;
  object.objectId = ids.next<ObjectId>();
  object.owner = std::move(request.owner);
  object.name = std::move(request.name);
  object.tags = std::move(request.tags);
  object.stereotype = request.stereotype;
  object.locator = std::move(request.locator);
  object.createdAt = createdAt;
  return object;
}

} // namespace pimhub
