#include "pimhub/core/url.hpp"

#include <algorithm>
#include <cctype>

namespace pimhub {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

struct Split {
  std::string_view scheme;
  std::string_view host;
  std::string_view path;
};

std::optional<Split> split(std::string_view url) {
  const auto sep = url.find("://");
  if (sep == std::string_view::npos || sep == 0)
    return std::nullopt;
  const auto scheme = url.substr(0, sep);
  if (!std::all_of(scheme.begin(), scheme.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '+' || c == '-' || c == '.';
      }))
    return std::nullopt;
  auto rest = url.substr(sep + 3);
  const auto cut = rest.find_first_of("?#");
  if (cut != std::string_view::npos)
    rest = rest.substr(0, cut);
  const auto slash = rest.find('/');
  const auto host = rest.substr(0, slash);
  if (host.empty())
    return std::nullopt;
  const auto path =
      slash == std::string_view::npos ? std::string_view{} : rest.substr(slash);
  return Split{scheme, host, path};
}

std::string join(const Split &s) {
  std::string out = lower(s.scheme);
  out += "://";
  out += lower(s.host);
  out += s.path.empty() ? std::string_view{"/"} : s.path;
  return out;
}

} // namespace

std::optional<std::string> normalize_url(std::string_view url) {
  auto parts = split(url);
  if (!parts || parts->host.find('*') != std::string_view::npos)
    return std::nullopt;
  return join(*parts);
}

bool is_absolute_url(std::string_view url) {
  return normalize_url(url).has_value();
}

bool glob_match(std::string_view pattern, std::string_view text) {
  // Greedy matcher with single backtrack point; linear in practice.
  std::size_t p = 0, t = 0;
  std::size_t star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (p < pattern.size() && pattern[p] == text[t]) {
      ++p;
      ++t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*')
    ++p;
  return p == pattern.size();
}

bool is_valid_url_pattern(std::string_view pattern) {
  return split(pattern).has_value();
}

bool url_pattern_matches(std::string_view pattern, std::string_view url) {
  const auto norm = normalize_url(url);
  const auto pat = split(pattern);
  if (!norm || !pat)
    return false;
  return glob_match(join(*pat), *norm);
}

} // namespace pimhub
