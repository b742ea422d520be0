#include "cfaudit/monitors.hpp"

namespace cfaudit {

uint16_t trigger_bit(Trigger t) {
  return static_cast<uint16_t>(1u << static_cast<unsigned>(t));
}

const char* trigger_name(Trigger t) {
  switch (t) {
    case Trigger::T1: return "T1";
    case Trigger::T2: return "T2";
    case Trigger::T3: return "T3";
    case Trigger::T4: return "T4";
  }
  return "?";
}

void TriggerLatch::set(Trigger t) {
  switch (t) {
    case Trigger::T1: t1 = true; break;
    case Trigger::T2: t2 = true; break;
    case Trigger::T3: t3 = true; break;
    case Trigger::T4: t4 = true; break;
  }
}

bool TriggerLatch::get(Trigger t) const {
  switch (t) {
    case Trigger::T1: return t1;
    case Trigger::T2: return t2;
    case Trigger::T3: return t3;
    case Trigger::T4: return t4;
  }
  return false;
}

std::optional<Trigger> select_trigger(TriggerLatch& latch) {
  if (latch.t3) {
    latch.t3 = false;
    return Trigger::T3;
  }
  if (latch.t4) {
    latch.t4 = false;
    return Trigger::T4;
  }
  if (latch.t2) {
    latch.t2 = false;
    return Trigger::T2;
  }
  if (latch.t1) {
    latch.t1 = false;
    return Trigger::T1;
  }
  return std::nullopt;
}

AcfaTickOut acfa_tick(const CpuView& cpu, uint16_t aer_min, uint16_t aer_max,
                      const CfLog& log, uint32_t slice_top) {
  if (aer_min >= aer_max) throw std::invalid_argument("empty measured region");
  AcfaTickOut out;
  out.t1 = (cpu.pc == aer_max);
  out.t4 = is_log_full(log.log_ptr(), slice_top, log.cf_size());
  out.log_enable = (cpu.pc >= aer_min && cpu.pc <= aer_max) && !cpu.in_tcb;
  return out;
}

bool acfa_protect(Actor actor, ProtRegion region, AccessKind kind) {
  if (actor == Actor::Tcb) return true;
  if (region == ProtRegion::Other) return true;
  if (kind == AccessKind::Write) return false;  // all protected regions
  return region != ProtRegion::KeySlot;         // key is not even readable
}

const char* prot_region_name(ProtRegion r) {
  switch (r) {
    case ProtRegion::TcbCode: return "TcbCode";
    case ProtRegion::LogRegion: return "LogRegion";
    case ProtRegion::KeySlot: return "KeySlot";
    case ProtRegion::CaramelData: return "CaramelData";
    case ProtRegion::CmUartConfig: return "CmUartConfig";
    case ProtRegion::Other: return "Other";
  }
  return "?";
}

const char* access_kind_name(AccessKind k) {
  return k == AccessKind::Read ? "Read" : "Write";
}

void SliceMonitorState::reset(uint32_t cf, uint32_t slice) {
  if (slice == 0 || slice % 4 != 0 || cf % slice != 0)
    throw std::invalid_argument(
        "slice_size must be a multiple of 4 dividing cf_size");
  cf_size = cf;
  slice_size = slice;
  slice_top = 0;
  slice_bot = 0;
  bound_low = incr(0, slice, cf);
  vrf_acc = true;
  slice_full = false;
}

SliceMonitorOut slice_monitor_tick(SliceMonitorState& s, uint32_t log_ptr,
                                   const SliceMonitorInputs& in) {
  SliceMonitorOut out;

  if (in.pc_at_accepted) {
    s.vrf_acc = true;
    s.slice_top = incr(s.slice_top, s.slice_size, s.cf_size);
  }

  if (in.t1 && s.vrf_acc) {
    // Final report covers whatever has accrued past slice_top. When T1 fires
    // with a report outstanding this rule waits for the deferred dispatch,
    // where the engine presents t1 again with vrf_acc restored.
    s.slice_bot = log_ptr;
  }

  s.slice_full = in.log_ptr_changed && log_ptr == s.bound_low;
  if (s.slice_full) {
    // A slice just filled. Report it if the verifier is caught up, and open
    // the next slice unless that would hand the writer the protected span.
    if (s.vrf_acc) {
      out.t2 = true;
      s.slice_bot = s.bound_low;
      s.vrf_acc = false;
    }
    if (!is_log_full(log_ptr, s.slice_top, s.cf_size))
      s.bound_low = incr(s.bound_low, s.slice_size, s.cf_size);
  }

  return out;
}

void CmTxState::reset() { *this = CmTxState{}; }

CmTxOut cm_tx_tick(CmTxState& s, const CmTxInputs& in, const ReportRegion& r) {
  CmTxOut out;
  const uint32_t cf = r.log->cf_size();
  const uint32_t report_size = r.report_size();

  if (in.t1) s.t1_pend = true;
  if (in.t2) s.t2_pend = true;
  if (in.pc_at_send) s.send_seen = true;

  bool begin = false;
  bool as_retransmit = false;
  if (!s.active() && !s.finish_cflog && s.tx_pend() && in.vrf_acc) {
    begin = true;
  } else if (!s.active() && !s.finish_cflog && in.begin_retransmission) {
    begin = true;
    as_retransmit = true;
  }

  if (begin) {
    s.read_idx = r.slice_top;
    s.wrap_target = r.slice_bot;
    s.retransmit = as_retransmit;
    // A replay pushes the trailer out again without a fresh send_addr visit;
    // the tag is still sitting in the report region.
    if (as_retransmit) s.send_seen = true;
    if (s.read_idx == s.wrap_target) {
      s.finish_cflog = true;  // empty slice: trailer-only report
      out.slice_done = true;
    } else {
      s.start_cflog = true;
    }
    out.stream_started = true;
  }

  if (s.start_cflog && in.baud_pulse) {
    out.byte = r.byte_at(s.read_idx);
    s.read_idx = incr(s.read_idx, 1, cf);
    if (s.read_idx == s.wrap_target) {
      s.start_cflog = false;
      s.finish_cflog = true;
      out.slice_done = true;
    }
  } else if (s.start_rem && in.baud_pulse) {
    out.byte = r.byte_at(s.read_idx);
    s.read_idx += 1;
    if (s.read_idx == report_size) {
      s.start_rem = false;
      s.finish_cflog = false;
      out.report_done = true;
      if (!s.retransmit) {
        // Completion clears the pend this report served; a T2 report takes
        // precedence when both are latched.
        if (s.t2_pend)
          s.t2_pend = false;
        else
          s.t1_pend = false;
      }
      s.retransmit = false;
    }
  }

  if (s.finish_cflog && s.send_seen && !s.start_rem) {
    s.send_seen = false;
    s.start_rem = true;
    s.read_idx = cf;
  }

  return out;
}

void CmRxState::reset() {
  write_idx = 0;
  buf.fill(0);
}

bool cm_rx_byte(CmRxState& s, uint8_t byte) {
  s.buf[s.write_idx] = byte;
  s.write_idx += 1;
  if (s.write_idx == s.buf.size()) {
    s.write_idx = 0;
    return true;
  }
  return false;
}

}  // namespace cfaudit
