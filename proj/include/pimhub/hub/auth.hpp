#pragma once

#include <random>
#include <string>
#include <string_view>

namespace pimhub {

/// Salted SHA-256 password hash. Both fields are lower-case hex.
struct Credentials {
  std::string salt;
  std::string hash;

  friend bool operator==(const Credentials &, const Credentials &) = default;
};

std::string sha256_hex(std::string_view bytes);
std::string random_hex(std::mt19937_64 &rng, std::size_t chars);

Credentials make_credentials(std::string_view password, std::string salt);
bool verify_password(const Credentials &credentials, std::string_view password);

} // namespace pimhub
