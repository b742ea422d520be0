#pragma once

#include <cstdint>

namespace cfaudit {

// Inputs to the contention-sizing rule: how fast the device can MAC and ship
// report bytes versus how fast the application produces log bytes.
struct SizingParams {
  double mac_rate = 8000.0;     // M, bytes/second through the HMAC
  double chan_rate = 11520.0;   // B, bytes/second on the wire
  uint32_t chal_size = 32;
  uint32_t token_size = 32;     // authentication tag bytes (A)
  uint32_t meta_size = 38;      // metadata block bytes (D)
  double branch_rate = 50.0;    // b, branches/second
};

// Seconds of MAC+wire work per report byte.
double sizing_R(const SizingParams& p);

// Fixed per-cycle message bytes: 2*chal + 2*A + D + 1.
uint32_t sizing_N(const SizingParams& p);

// Log fill rate in bytes/second (4 bytes per branch).
double sizing_l(const SizingParams& p);

struct SizingBound {
  bool unbounded = false;  // R*l >= 1: no finite log avoids contention
  uint32_t cf_size = 0;    // smallest multiple of 4 strictly above the bound
  double raw_bound = 0.0;  // 2*R*N*l / (1 - R*l)
};

SizingBound min_contention_free_log_size(const SizingParams& p);

}  // namespace cfaudit
