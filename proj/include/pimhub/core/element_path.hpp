#pragma once

#include <concepts>
#include <cstddef>
#include <optional>
#include <ranges>
#include <string>
#include <string_view>
#include <vector>

namespace pimhub {

/// Structural address of a node: an optional id anchor followed by
/// child indices. Text form: "/" (root), "/0/2", "#main", "#main/1/0".
struct ElementPath {
  std::optional<std::string> anchor;
  std::vector<std::size_t> steps;

  friend bool operator==(const ElementPath &, const ElementPath &) = default;
};

std::optional<ElementPath> parse_element_path(std::string_view text);
std::string format_element_path(const ElementPath &path);

/// Relative paths (inside a wrapped element) never carry an anchor.
std::optional<ElementPath> parse_relative_path(std::string_view text);

template <typename Node>
concept TreeNode = requires(const Node &n) {
  { n.id } -> std::convertible_to<std::string>;
  { n.children } -> std::ranges::random_access_range;
};

namespace detail {

template <TreeNode Node>
void collect_by_id(const Node &node, std::string_view id,
                   std::vector<const Node *> &out) {
  if (node.id == id)
    out.push_back(&node);
  for (const auto &child : node.children)
    collect_by_id(child, id, out);
}

} // namespace detail

/// Resolves `path` under `root`. An anchor must name exactly one node in
/// the tree; any missing or ambiguous step yields nullptr.
template <TreeNode Node>
const Node *resolve_path(const ElementPath &path, const Node &root) {
  const Node *node = &root;
  if (path.anchor) {
    std::vector<const Node *> hits;
    detail::collect_by_id(root, *path.anchor, hits);
    if (hits.size() != 1)
      return nullptr;
    node = hits.front();
  }
  for (std::size_t step : path.steps) {
    if (step >= node->children.size())
      return nullptr;
    node = &node->children[step];
  }
  return node;
}

template <TreeNode Node>
Node *resolve_path(const ElementPath &path, Node &root) {
  return const_cast<Node *>(
      resolve_path(path, static_cast<const Node &>(root)));
}

} // namespace pimhub
