#include "cfaudit/channel.hpp"

#include <stdexcept>

namespace cfaudit {

int64_t byte_time_ns(const LinkConfig& link) {
  return tx_duration_ns(link, 1);
}

int64_t tx_duration_ns(const LinkConfig& link, uint64_t nbytes) {
  if (link.baud == 0) throw std::invalid_argument("baud must be positive");
  unsigned __int128 bits =
      static_cast<unsigned __int128>(nbytes) * link.bits_per_byte;
  unsigned __int128 ns = (bits * 1'000'000'000u + link.baud / 2) / link.baud;
  return static_cast<int64_t>(ns);
}

Channel::Channel(LinkConfig link, std::vector<AdvRule> rules,
                 uint64_t rng_seed)
    : link_(link),
      byte_ns_(byte_time_ns(link)),
      rules_(std::move(rules)),
      rng_(rng_seed) {
  for (const AdvRule& r : rules_) {
    if (r.kind == AdvKind::Replay) keep_history_ = true;
  }
}

std::vector<const AdvRule*> Channel::rules_for(Direction dir,
                                               int64_t index) const {
  std::vector<const AdvRule*> out;
  for (const AdvRule& r : rules_) {
    if (r.dir == dir && (r.msg_index < 0 || r.msg_index == index)) {
      out.push_back(&r);
    }
  }
  return out;
}

std::vector<uint8_t> Channel::forge_bytes(size_t len) {
  std::vector<uint8_t> out(len);
  for (size_t i = 0; i < len; ++i) {
    out[i] = static_cast<uint8_t>(rng_() >> 32);
  }
  return out;
}

void Channel::ptov_push_byte(uint8_t b) { ptov_buf_.push_back(b); }

void Channel::ptov_abort() { ptov_buf_.clear(); }

std::vector<PtovDelivery> Channel::ptov_close(int64_t close_ns,
                                              uint16_t declared_trigger_state) {
  int64_t index = static_cast<int64_t>(ptov_count_++);
  std::vector<uint8_t> bytes = std::move(ptov_buf_);
  ptov_buf_.clear();
  if (keep_history_) ptov_history_.push_back({bytes, declared_trigger_state});

  std::vector<PtovDelivery> out;
  PtovDelivery main;
  main.bytes = std::move(bytes);
  main.declared_trigger_state = declared_trigger_state;
  main.arrive_ns = close_ns + link_.rtt_ns / 2;
  bool dropped = false;
  std::vector<PtovDelivery> extra;

  for (const AdvRule* r : rules_for(Direction::PtoV, index)) {
    switch (r->kind) {
      case AdvKind::Drop:
        dropped = true;
        break;
      case AdvKind::Delay:
        main.arrive_ns += r->delay_ns;
        break;
      case AdvKind::TamperByte:
        if (r->byte_offset < main.bytes.size()) {
          main.bytes[r->byte_offset] ^= r->xor_mask;
        }
        break;
      case AdvKind::Forge:
        main.bytes = forge_bytes(main.bytes.size());
        break;
      case AdvKind::Replay: {
        if (r->replay_of < 0 ||
            static_cast<size_t>(r->replay_of) >= ptov_history_.size()) {
          throw std::out_of_range("replay of a report not yet on the wire");
        }
        const Stored& old = ptov_history_[static_cast<size_t>(r->replay_of)];
        PtovDelivery copy;
        copy.bytes = old.bytes;
        copy.declared_trigger_state = old.declared_trigger_state;
        // Injected right behind the live report, at wire pace.
        copy.arrive_ns = main.arrive_ns +
                         tx_duration_ns(link_, old.bytes.size());
        extra.push_back(std::move(copy));
        break;
      }
    }
  }

  if (!dropped) out.push_back(std::move(main));
  for (auto& e : extra) out.push_back(std::move(e));
  return out;
}

std::vector<VtopDelivery> Channel::vtop_send(const ResponseFrame& frame,
                                             int64_t send_ns) {
  int64_t index = static_cast<int64_t>(vtop_count_++);
  std::vector<uint8_t> bytes = encode_response(frame);
  if (keep_history_) vtop_history_.push_back({bytes, 0});

  std::vector<VtopDelivery> out;
  VtopDelivery main;
  main.bytes = std::move(bytes);
  main.start_ns = send_ns + link_.rtt_ns / 2;
  bool dropped = false;
  std::vector<VtopDelivery> extra;

  for (const AdvRule* r : rules_for(Direction::VtoP, index)) {
    switch (r->kind) {
      case AdvKind::Drop:
        dropped = true;
        break;
      case AdvKind::Delay:
        main.start_ns += r->delay_ns;
        break;
      case AdvKind::TamperByte:
        if (r->byte_offset < main.bytes.size()) {
          main.bytes[r->byte_offset] ^= r->xor_mask;
        }
        break;
      case AdvKind::Forge:
        main.bytes = forge_bytes(main.bytes.size());
        break;
      case AdvKind::Replay: {
        if (r->replay_of < 0 ||
            static_cast<size_t>(r->replay_of) >= vtop_history_.size()) {
          throw std::out_of_range("replay of a response not yet on the wire");
        }
        VtopDelivery copy;
        copy.bytes = vtop_history_[static_cast<size_t>(r->replay_of)].bytes;
        copy.start_ns =
            main.start_ns + tx_duration_ns(link_, main.bytes.size());
        extra.push_back(std::move(copy));
        break;
      }
    }
  }

  if (!dropped) out.push_back(std::move(main));
  for (auto& e : extra) out.push_back(std::move(e));
  return out;
}

}  // namespace cfaudit
