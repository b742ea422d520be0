#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cfaudit/frames.hpp"

namespace cfaudit {

// UART-style serial link. bits_per_byte covers start/stop framing overhead.
struct LinkConfig {
  uint32_t baud = 115200;
  uint32_t bits_per_byte = 10;
  int64_t rtt_ns = 100'000'000;
};

// Wire time of one byte, rounded to the nearest nanosecond.
int64_t byte_time_ns(const LinkConfig& link);

// Completion time offset of the k-th byte (1-based) from transmission start.
// Computed from k directly so rounding does not accumulate.
int64_t tx_duration_ns(const LinkConfig& link, uint64_t nbytes);

enum class Direction : uint8_t { PtoV, VtoP };

enum class AdvKind : uint8_t {
  Drop,        // message never arrives
  Delay,       // arrival shifted by delay_ns
  TamperByte,  // XOR one byte of the message
  Forge,       // replace the message with attacker-fabricated bytes
  Replay,      // additionally deliver a copy of an earlier message
};

// One adversary action on the link. msg_index counts messages per direction
// from 0; -1 matches every message. Rules are applied in declaration order.
struct AdvRule {
  AdvKind kind = AdvKind::Drop;
  Direction dir = Direction::PtoV;
  int64_t msg_index = -1;
  int64_t delay_ns = 0;      // Delay
  uint32_t byte_offset = 0;  // TamperByte
  uint8_t xor_mask = 0xff;   // TamperByte
  int64_t replay_of = 0;     // Replay: history index to re-deliver
};

struct PtovDelivery {
  std::vector<uint8_t> bytes;
  uint16_t declared_trigger_state = 0;
  int64_t arrive_ns = 0;
};

struct VtopDelivery {
  std::vector<uint8_t> bytes;
  // Transmission start at the prover end of the wire: byte k (0-based)
  // completes at start_ns + tx_duration_ns(link, k + 1).
  int64_t start_ns = 0;
};

// Serial channel between prover and verifier with a deterministic in-path
// adversary. The channel computes delivery times; the caller owns the event
// queue and feeds transmitted bytes / send instants in simulation order.
class Channel {
 public:
  Channel(LinkConfig link, std::vector<AdvRule> rules, uint64_t rng_seed);

  const LinkConfig& link() const { return link_; }
  int64_t byte_ns() const { return byte_ns_; }

  // Prover-side UART output, one byte per wire slot. close() seals the
  // current report message; close_ns is the completion time of its last byte.
  void ptov_push_byte(uint8_t b);
  void ptov_abort();
  std::vector<PtovDelivery> ptov_close(int64_t close_ns,
                                       uint16_t declared_trigger_state);

  // Verifier-side response, sent as a whole at send_ns.
  std::vector<VtopDelivery> vtop_send(const ResponseFrame& frame,
                                      int64_t send_ns);

  uint64_t ptov_messages() const { return ptov_count_; }
  uint64_t vtop_messages() const { return vtop_count_; }

 private:
  struct Stored {
    std::vector<uint8_t> bytes;
    uint16_t declared_trigger_state = 0;
  };

  std::vector<const AdvRule*> rules_for(Direction dir, int64_t index) const;
  std::vector<uint8_t> forge_bytes(size_t len);

  LinkConfig link_;
  int64_t byte_ns_;
  std::vector<AdvRule> rules_;
  bool keep_history_ = false;
  std::mt19937_64 rng_;

  std::vector<uint8_t> ptov_buf_;
  uint64_t ptov_count_ = 0;
  uint64_t vtop_count_ = 0;
  std::vector<Stored> ptov_history_;
  std::vector<Stored> vtop_history_;
};

}  // namespace cfaudit
