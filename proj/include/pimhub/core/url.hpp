#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace pimhub {

/// Scheme + host + path of an absolute URL. Query and fragment are dropped,
/// scheme and host are lower-cased and an empty path becomes "/".
/// Returns nullopt when `url` is not absolute.
std::optional<std::string> normalize_url(std::string_view url);

bool is_absolute_url(std::string_view url);

/// `*` matches any run of characters, including '/'. Everything else is literal.
bool glob_match(std::string_view pattern, std::string_view text);

/// A URL pattern must look like an absolute URL with a non-empty host part.
bool is_valid_url_pattern(std::string_view pattern);

/// Matches `url` (normalized) against `pattern` (normalized the same way).
bool url_pattern_matches(std::string_view pattern, std::string_view url);

} // namespace pimhub
