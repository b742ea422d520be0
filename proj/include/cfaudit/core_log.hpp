#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cfaudit {

// One logged control-flow transfer: branch source and destination addresses.
struct Transfer {
  uint16_t src = 0;
  uint16_t dst = 0;
  bool operator==(const Transfer&) const = default;
};

// Wrapped pointer arithmetic over a circular byte buffer. base and the result
// are byte offsets in [0, cf_size); delta is a non-negative byte count.
uint32_t incr(uint32_t base, uint32_t delta, uint32_t cf_size);

// Distance walked from `from` up to (but not including) `to`, following the
// wrap direction. from == to means an empty span, not a full one.
uint32_t wrapped_distance(uint32_t from, uint32_t to, uint32_t cf_size);

// Full condition: one more word of headroom is always kept so the write
// pointer can never collide with the protected slice boundary.
bool is_log_full(uint32_t log_ptr, uint32_t slice_top, uint32_t cf_size);

class CfLog;
bool is_log_full(const CfLog& log, uint32_t slice_top);

struct AppendWhileFull : std::logic_error {
  AppendWhileFull() : std::logic_error("append into a full control-flow log") {}
};

// Circular control-flow log. Words are 16-bit little-endian addresses; a
// transfer is two consecutive words (source, destination). The log itself is
// dumb storage plus a write pointer; full/contention decisions live in the
// monitors, which pass the active slice_top in when they want the write
// guarded.
class CfLog {
 public:
  explicit CfLog(uint32_t cf_size);

  uint32_t cf_size() const { return cf_size_; }
  uint32_t log_ptr() const { return log_ptr_; }
  void set_log_ptr(uint32_t p);

  // Writes one 16-bit word at log_ptr and advances it by 2 (wrapped). When
  // guard_slice_top is present the write is refused with AppendWhileFull if
  // the log is full relative to that boundary; hitting this means a monitor
  // failed to raise T4 first.
  void append_word(uint16_t word,
                   std::optional<uint32_t> guard_slice_top = std::nullopt);
  void append_transfer(uint16_t src, uint16_t dst,
                       std::optional<uint32_t> guard_slice_top = std::nullopt);

  uint8_t byte_at(uint32_t idx) const;

  // Bytes of the wrapped span [from, to). from == to yields an empty vector.
  std::vector<uint8_t> span_bytes(uint32_t from, uint32_t to) const;

  void clear();

  const std::vector<uint8_t>& raw() const { return buf_; }

 private:
  uint32_t cf_size_;
  uint32_t log_ptr_ = 0;
  std::vector<uint8_t> buf_;
};

}  // namespace cfaudit
