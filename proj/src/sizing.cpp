#include "cfaudit/sizing.hpp"

#include <cmath>
#include <stdexcept>

namespace cfaudit {

double sizing_R(const SizingParams& p) {
  if (p.mac_rate <= 0.0 || p.chan_rate <= 0.0)
    throw std::invalid_argument("sizing: rates must be positive");
  return 1.0 / p.mac_rate + 1.0 / p.chan_rate;
}

uint32_t sizing_N(const SizingParams& p) {
  return 2 * p.chal_size + 2 * p.token_size + p.meta_size + 1;
}

double sizing_l(const SizingParams& p) {
  if (p.branch_rate <= 0.0)
    throw std::invalid_argument("sizing: branch_rate must be positive");
  return 4.0 * p.branch_rate;
}

SizingBound min_contention_free_log_size(const SizingParams& p) {
  const double r = sizing_R(p);
  const double l = sizing_l(p);
  SizingBound out;
  if (r * l >= 1.0) {
    out.unbounded = true;
    return out;
  }
  const double n = static_cast<double>(sizing_N(p));
  out.raw_bound = 2.0 * r * n * l / (1.0 - r * l);
  // Smallest multiple of 4 strictly greater than the bound.
  uint64_t q = static_cast<uint64_t>(std::floor(out.raw_bound / 4.0)) + 1;
  out.cf_size = static_cast<uint32_t>(q * 4);
  return out;
}

}  // namespace cfaudit
