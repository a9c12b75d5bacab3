#include "pimhub/sim/page.hpp"

#include <cctype>

#include "pimhub/core/error.hpp"
#include "pimhub/core/url.hpp"

namespace pimhub::sim {
namespace {

class TreeParser {
public:
  explicit TreeParser(std::string_view s) : s_(s) {}

  PageNode parse() {
    skip_ws();
    PageNode root = node();
    skip_ws();
    if (pos_ != s_.size())
      fail("trailing input");
    return root;
  }

private:
  [[noreturn]] void fail(const std::string &why) const {
    throw Error(Errc::ScenarioError,
                "page tree column " + std::to_string(pos_ + 1) + ": " + why);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  static bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
           c == '.' || c == ':';
  }

  std::string word() {
    auto start = pos_;
    while (pos_ < s_.size() && word_char(s_[pos_]))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string quoted() {
    ++pos_; // opening quote
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size())
        ++pos_;
      out += s_[pos_++];
    }
    if (pos_ == s_.size())
      fail("unterminated text");
    ++pos_;
    return out;
  }

  PageNode node() {
    PageNode n;
    n.tag = word();
    if (n.tag.empty())
      fail("expected a tag name");
    if (pos_ < s_.size() && s_[pos_] == '#') {
      ++pos_;
      n.id = word();
      if (n.id.empty())
        fail("empty id");
    }
    if (pos_ < s_.size() && s_[pos_] == '"')
      n.text = quoted();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      for (;;) {
        skip_ws();
        if (pos_ == s_.size())
          fail("missing ')'");
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        n.children.push_back(node());
      }
    }
    return n;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

bool chain_to(PageNode &node, const PageNode *target, std::vector<PageNode *> &chain) {
  chain.push_back(&node);
  if (&node == target)
    return true;
  for (auto &c : node.children)
    if (chain_to(c, target, chain))
      return true;
  chain.pop_back();
  return false;
}

} // namespace

PageNode parse_page_tree(std::string_view text) { return TreeParser(text).parse(); }

std::string format_page_tree(const PageNode &node) {
  std::string out = node.tag;
  if (!node.id.empty())
    out += "#" + node.id;
  if (!node.text.empty()) {
    out += '"';
    for (char c : node.text) {
      if (c == '"' || c == '\\')
        out += '\\';
      out += c;
    }
    out += '"';
  }
  if (!node.children.empty()) {
    out += '(';
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (i)
        out += ' ';
      out += format_page_tree(node.children[i]);
    }
    out += ')';
  }
  return out;
}

std::vector<PageNode *> ancestor_chain(PageNode &root, const PageNode *target) {
  std::vector<PageNode *> chain;
  if (!chain_to(root, target, chain))
    chain.clear();
  return chain;
}

void PageLibrary::define(std::string pattern, PageNode root) {
  for (auto &[p, r] : pages_)
    if (p == pattern) {
      r = std::move(root);
      return;
    }
  pages_.emplace_back(std::move(pattern), std::move(root));
}

VirtualPage PageLibrary::load(std::string_view url) const {
  for (const auto &[p, r] : pages_)
    if (url_pattern_matches(p, url))
      return VirtualPage{std::string(url), r};
  return VirtualPage{std::string(url), PageNode{"body", "", "", {}, false}};
}

} // namespace pimhub::sim
