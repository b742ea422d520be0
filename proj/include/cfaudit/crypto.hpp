#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace cfaudit {

using Digest = std::array<uint8_t, 32>;
using MacTag = std::array<uint8_t, 32>;
using Key = std::array<uint8_t, 32>;
using Challenge = std::array<uint8_t, 32>;

Digest sha256(const uint8_t* data, size_t len);
Digest sha256(const std::vector<uint8_t>& data);

MacTag hmac_sha256(const uint8_t* key, size_t key_len, const uint8_t* data,
                   size_t len);
MacTag hmac_sha256(const Key& key, const std::vector<uint8_t>& data);

// Constant-time comparison; protocol code never branches on early mismatch.
bool tag_equal(const MacTag& a, const MacTag& b);

}  // namespace cfaudit
