#include "pimhub/core/element_path.hpp"

#include <cctype>
#include <charconv>

namespace pimhub {
namespace {

bool id_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         c == '-' || c == ':' || c == '.';
}

std::optional<std::vector<std::size_t>> parse_steps(std::string_view text) {
  std::vector<std::size_t> steps;
  if (text.empty() || text == "/")
    return steps;
  if (text.front() != '/')
    return std::nullopt;
  text.remove_prefix(1);
  while (true) {
    const auto slash = text.find('/');
    const auto piece = text.substr(0, slash);
    if (piece.empty())
      return std::nullopt;
    std::size_t value = 0;
    auto [ptr, ec] =
        std::from_chars(piece.data(), piece.data() + piece.size(), value);
    if (ec != std::errc{} || ptr != piece.data() + piece.size())
      return std::nullopt;
    steps.push_back(value);
    if (slash == std::string_view::npos)
      break;
    text.remove_prefix(slash + 1);
  }
  return steps;
}

} // namespace

std::optional<ElementPath> parse_element_path(std::string_view text) {
  if (text.empty())
    return std::nullopt;
  ElementPath path;
  if (text.front() == '#') {
    const auto end = text.find('/');
    const auto id = text.substr(1, end == std::string_view::npos
                                       ? std::string_view::npos
                                       : end - 1);
    if (id.empty())
      return std::nullopt;
    for (char c : id)
      if (!id_char(c))
        return std::nullopt;
    path.anchor = std::string(id);
    text = end == std::string_view::npos ? std::string_view{}
                                         : text.substr(end);
    if (text == "/")
      return std::nullopt;
  } else if (text.front() != '/') {
    return std::nullopt;
  }
  auto steps = parse_steps(text);
  if (!steps)
    return std::nullopt;
  path.steps = std::move(*steps);
  return path;
}

std::optional<ElementPath> parse_relative_path(std::string_view text) {
  auto path = parse_element_path(text);
  if (!path || path->anchor)
    return std::nullopt;
  return path;
}

std::string format_element_path(const ElementPath &path) {
  std::string out;
  if (path.anchor)
    out = "#" + *path.anchor;
  for (std::size_t step : path.steps) {
    out += '/';
    out += std::to_string(step);
  }
  if (out.empty())
    out = "/";
  return out;
}

} // namespace pimhub
