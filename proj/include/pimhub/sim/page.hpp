#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pimhub/core/element_path.hpp"

namespace pimhub::sim {

/// Stand-in for a DOM node. Only what locators and commands touch.
struct PageNode {
  std::string tag;
  std::string id;
  std::string text;
  std::vector<PageNode> children;
  bool hidden = false;

  friend bool operator==(const PageNode &, const PageNode &) = default;
};

/// Tree syntax, one node:  tag[#id]["text"][( child child ... )]
/// e.g.  body(div#toc(a"One" a"Two") p"intro")
/// Throws Error(ScenarioError) with the offending column.
PageNode parse_page_tree(std::string_view text);
std::string format_page_tree(const PageNode &node);

/// Root-to-node chain for `target`, empty if it is not under `root`.
std::vector<PageNode *> ancestor_chain(PageNode &root, const PageNode *target);

struct VirtualPage {
  std::string url;
  PageNode root;
};

/// URL-pattern keyed page templates. Later definitions for the same pattern
/// replace earlier ones; lookup takes the first pattern that matches.
class PageLibrary {
public:
  void define(std::string pattern, PageNode root);
  /// Unknown URLs load an empty body.
  VirtualPage load(std::string_view url) const;

private:
  std::vector<std::pair<std::string, PageNode>> pages_;
};

} // namespace pimhub::sim
