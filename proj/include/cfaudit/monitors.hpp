#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "cfaudit/core_log.hpp"
#include "cfaudit/frames.hpp"

namespace cfaudit {

enum class Trigger : uint8_t { T1 = 0, T2 = 1, T3 = 2, T4 = 3 };

// One-hot encoding used in the metadata block and report MACs.
uint16_t trigger_bit(Trigger t);
const char* trigger_name(Trigger t);

struct TriggerLatch {
  bool t1 = false;
  bool t2 = false;
  bool t3 = false;
  bool t4 = false;

  bool any() const { return t1 || t2 || t3 || t4; }
  void set(Trigger t);
  bool get(Trigger t) const;
  void clear_all() { t1 = t2 = t3 = t4 = false; }
};

// Dispatch priority T3 > T4 > T2 > T1: a received response can clear the
// conditions behind the others. The chosen trigger is cleared, the rest stay
// latched and re-dispatch later. (Whether a latched T1 may dispatch while a
// report is outstanding is the engine's call; it holds T1 until vrf_acc.)
std::optional<Trigger> select_trigger(TriggerLatch& latch);

// What the address monitor decides on one CPU step.
struct CpuView {
  uint16_t pc = 0;
  bool in_tcb = false;
};

struct AcfaTickOut {
  bool t1 = false;
  bool t4 = false;
  bool log_enable = false;
};

AcfaTickOut acfa_tick(const CpuView& cpu, uint16_t aer_min, uint16_t aer_max,
                      const CfLog& log, uint32_t slice_top);

// Memory protections against the untrusted application: writes to any
// protected region and reads of the key are violations that reset the device.
enum class Actor : uint8_t { Untrusted, Tcb };
enum class ProtRegion : uint8_t {
  TcbCode,
  LogRegion,
  KeySlot,
  CaramelData,   // metadata / report / response blocks
  CmUartConfig,  // baud divisor etc.
  Other,
};
enum class AccessKind : uint8_t { Read, Write };

bool acfa_protect(Actor actor, ProtRegion region, AccessKind kind);

const char* prot_region_name(ProtRegion r);
const char* access_kind_name(AccessKind k);

// ---------------------------------------------------------------------------
// Slice monitor: carves the circular log into fixed-size slices, tracks which
// span the next report covers and whether the verifier is caught up.
//
//   slice_top  — base of the oldest unattested data (advances on acceptance)
//   slice_bot  — end of the span the pending report covers
//   bound_low  — next slice boundary the writer has to reach
//   vrf_acc    — no report is outstanding
//   slice_full — the write pointer reached bound_low on this step
//
// slice_full is clocked by the log write strobe (an edge, not a standing
// level), so a boundary coincidence on a non-write step never re-fires T2.
// ---------------------------------------------------------------------------

struct SliceMonitorState {
  uint32_t cf_size = 0;
  uint32_t slice_size = 0;
  uint32_t slice_top = 0;
  uint32_t slice_bot = 0;
  uint32_t bound_low = 0;
  bool vrf_acc = true;
  bool slice_full = false;

  void reset(uint32_t cf, uint32_t slice);
};

struct SliceMonitorInputs {
  bool log_ptr_changed = false;  // a word landed in the log this step
  bool pc_at_accepted = false;   // TCB signalled an accepted response
  bool t1 = false;               // final-report trigger presented this step
};

struct SliceMonitorOut {
  bool t2 = false;  // slice boundary reached with the verifier caught up
};

SliceMonitorOut slice_monitor_tick(SliceMonitorState& s, uint32_t log_ptr,
                                   const SliceMonitorInputs& in);

// ---------------------------------------------------------------------------
// Contention monitor, TX half: streams the pending slice and, once the TCB
// has deposited the authentication tag and touched send_addr, the trailer.
// pend flags latch on trigger pulses and clear on the completion edge of the
// report they caused (t2 first when both are pending); a retransmission
// replays the same span without touching them. The send_addr visit is
// latched so a wire slower than the MAC still gets its trailer.
// ---------------------------------------------------------------------------

struct CmTxState {
  bool t1_pend = false;
  bool t2_pend = false;
  bool start_cflog = false;   // slice phase running
  bool finish_cflog = false;  // slice phase done; hold until trailer completes
  bool start_rem = false;     // trailer phase running
  bool send_seen = false;     // latched PC == send_addr
  bool retransmit = false;    // current stream is a replay
  uint32_t read_idx = 0;
  uint32_t wrap_target = 0;

  bool tx_pend() const { return t1_pend || t2_pend; }
  bool active() const { return start_cflog || start_rem; }

  void reset();
};

struct CmTxInputs {
  bool baud_pulse = false;
  bool t1 = false;
  bool t2 = false;
  bool vrf_acc = false;
  bool pc_at_send = false;
  bool begin_retransmission = false;
};

struct CmTxOut {
  std::optional<uint8_t> byte;  // emitted on this baud pulse
  bool stream_started = false;
  bool slice_done = false;
  bool report_done = false;  // trailer completed: whole report on the wire
};

CmTxOut cm_tx_tick(CmTxState& s, const CmTxInputs& in, const ReportRegion& r);

// RX half: assembles verifier responses byte by byte; a full frame raises T3.
struct CmRxState {
  uint32_t write_idx = 0;
  std::array<uint8_t, ResponseFrame::kWireSize> buf{};

  void reset();
};

bool cm_rx_byte(CmRxState& s, uint8_t byte);

}  // namespace cfaudit
