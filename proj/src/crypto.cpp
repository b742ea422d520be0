#include "cfaudit/crypto.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace cfaudit {

Digest sha256(const uint8_t* data, size_t len) {
  Digest out{};
  unsigned int out_len = 0;
  if (EVP_Digest(data, len, out.data(), &out_len, EVP_sha256(), nullptr) != 1 ||
      out_len != out.size())
    throw std::runtime_error("sha256 failed");
  return out;
}

Digest sha256(const std::vector<uint8_t>& data) {
  return sha256(data.data(), data.size());
}

MacTag hmac_sha256(const uint8_t* key, size_t key_len, const uint8_t* data,
                   size_t len) {
  static EVP_MAC* mac = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
  if (!mac) throw std::runtime_error("HMAC unavailable");
  EVP_MAC_CTX* ctx = EVP_MAC_CTX_new(mac);
  if (!ctx) throw std::runtime_error("HMAC ctx alloc failed");
  char digest_name[] = "SHA256";
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest_name, 0),
      OSSL_PARAM_construct_end()};
  MacTag out{};
  size_t out_len = 0;
  bool ok = EVP_MAC_init(ctx, key, key_len, params) == 1 &&
            EVP_MAC_update(ctx, data, len) == 1 &&
            EVP_MAC_final(ctx, out.data(), &out_len, out.size()) == 1 &&
            out_len == out.size();
  EVP_MAC_CTX_free(ctx);
  if (!ok) throw std::runtime_error("hmac-sha256 failed");
  return out;
}

MacTag hmac_sha256(const Key& key, const std::vector<uint8_t>& data) {
  return hmac_sha256(key.data(), key.size(), data.data(), data.size());
}

bool tag_equal(const MacTag& a, const MacTag& b) {
  unsigned diff = 0;
  for (size_t i = 0; i < a.size(); ++i) diff |= a[i] ^ b[i];
  return diff == 0;
}

}  // namespace cfaudit
