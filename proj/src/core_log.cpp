#include "cfaudit/core_log.hpp"

namespace cfaudit {

uint32_t incr(uint32_t base, uint32_t delta, uint32_t cf_size) {
  if (cf_size == 0) throw std::invalid_argument("cf_size must be positive");
  return static_cast<uint32_t>(
      (static_cast<uint64_t>(base) + static_cast<uint64_t>(delta)) % cf_size);
}

uint32_t wrapped_distance(uint32_t from, uint32_t to, uint32_t cf_size) {
  if (from >= cf_size || to >= cf_size)
    throw std::invalid_argument("offset outside the log");
  return (to + cf_size - from) % cf_size;
}

bool is_log_full(uint32_t log_ptr, uint32_t slice_top, uint32_t cf_size) {
  return incr(log_ptr, 2, cf_size) == slice_top;
}

bool is_log_full(const CfLog& log, uint32_t slice_top) {
  return is_log_full(log.log_ptr(), slice_top, log.cf_size());
}

CfLog::CfLog(uint32_t cf_size) : cf_size_(cf_size), buf_(cf_size, 0) {
  if (cf_size < 4 || cf_size % 4 != 0)
    throw std::invalid_argument("cf_size must be a positive multiple of 4");
}

void CfLog::set_log_ptr(uint32_t p) {
  if (p >= cf_size_ || p % 2 != 0)
    throw std::invalid_argument("log_ptr must be an even offset inside the log");
  log_ptr_ = p;
}

void CfLog::append_word(uint16_t word, std::optional<uint32_t> guard_slice_top) {
  if (guard_slice_top && is_log_full(log_ptr_, *guard_slice_top, cf_size_))
    throw AppendWhileFull();
  buf_[log_ptr_] = static_cast<uint8_t>(word & 0xff);
  buf_[incr(log_ptr_, 1, cf_size_)] = static_cast<uint8_t>(word >> 8);
  log_ptr_ = incr(log_ptr_, 2, cf_size_);
}

void CfLog::append_transfer(uint16_t src, uint16_t dst,
                            std::optional<uint32_t> guard_slice_top) {
  append_word(src, guard_slice_top);
  append_word(dst, guard_slice_top);
}

uint8_t CfLog::byte_at(uint32_t idx) const {
  if (idx >= cf_size_) throw std::out_of_range("log byte index");
  return buf_[idx];
}

std::vector<uint8_t> CfLog::span_bytes(uint32_t from, uint32_t to) const {
  uint32_t len = wrapped_distance(from, to, cf_size_);
  std::vector<uint8_t> out;
  out.reserve(len);
  for (uint32_t i = 0, p = from; i < len; ++i, p = incr(p, 1, cf_size_))
    out.push_back(buf_[p]);
  return out;
}

void CfLog::clear() {
  std::fill(buf_.begin(), buf_.end(), 0);
  log_ptr_ = 0;
}

}  // namespace cfaudit
