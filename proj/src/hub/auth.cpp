#include "pimhub/hub/auth.hpp"

#include <array>
#include <memory>
#include <stdexcept>

#include <openssl/crypto.h>
#include <openssl/evp.h>

namespace pimhub {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                             &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

std::string random_hex(std::mt19937_64 &rng, std::size_t chars) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(chars);
  while (out.size() < chars) {
    auto word = rng();
    for (int i = 0; i < 16 && out.size() < chars; ++i, word >>= 4)
      out += kHex[word & 15];
  }
  return out;
}

Credentials make_credentials(std::string_view password, std::string salt) {
  std::string material = salt;
  material += ':';
  material += password;
  return Credentials{std::move(salt), sha256_hex(material)};
}

bool verify_password(const Credentials &credentials, std::string_view password) {
  const auto expected = make_credentials(password, credentials.salt).hash;
  return expected.size() == credentials.hash.size() &&
         CRYPTO_memcmp(expected.data(), credentials.hash.data(), expected.size()) == 0;
}

} // namespace pimhub
