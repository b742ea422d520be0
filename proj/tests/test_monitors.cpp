#include <optional>
#include <vector>

#include "cfaudit/core_log.hpp"
#include "cfaudit/monitors.hpp"
#include "doctest.h"

using namespace cfaudit;

namespace {

struct SliceSnap {
  uint32_t top, bot, bound;
  bool acc, full, t2;
};

bool operator==(const SliceSnap& a, const SliceSnap& b) {
  return a.top == b.top && a.bot == b.bot && a.bound == b.bound &&
         a.acc == b.acc && a.full == b.full && a.t2 == b.t2;
}

doctest::String toString(const SliceSnap& s) {
  return (std::string("{top=") + std::to_string(s.top) +
          " bot=" + std::to_string(s.bot) + " bound=" + std::to_string(s.bound) +
          " acc=" + std::to_string(s.acc) + " full=" + std::to_string(s.full) +
          " t2=" + std::to_string(s.t2) + "}")
      .c_str();
}

// Drives one slice monitor step and returns the post-state plus the t2 line.
SliceSnap step(SliceMonitorState& s, uint32_t log_ptr,
               const SliceMonitorInputs& in) {
  bool t2 = slice_monitor_tick(s, log_ptr, in).t2;
  return {s.slice_top, s.slice_bot, s.bound_low, s.vrf_acc, s.slice_full, t2};
}

SliceSnap write_step(SliceMonitorState& s, CfLog& log, uint16_t word) {
  log.append_word(word, s.slice_top);
  SliceMonitorInputs in;
  in.log_ptr_changed = true;
  return step(s, log.log_ptr(), in);
}

SliceSnap accept_step(SliceMonitorState& s, const CfLog& log) {
  SliceMonitorInputs in;
  in.pc_at_accepted = true;
  return step(s, log.log_ptr(), in);
}

// Pumps cm_tx baud slots until the report completes, collecting bytes.
// send_after_slice injects the send_addr visit once the slice phase is done
// (the MAC "finishing" mid-stream).
std::vector<uint8_t> pump_report(CmTxState& s, const ReportRegion& r,
                                 bool send_on_start = false) {
  std::vector<uint8_t> out;
  if (send_on_start) {
    CmTxInputs in;
    in.pc_at_send = true;
    cm_tx_tick(s, in, r);
  }
  bool slice_done = !s.start_cflog && s.finish_cflog;
  for (int guard = 0; guard < 4096; ++guard) {
    if (slice_done && !send_on_start && !s.start_rem && s.finish_cflog &&
        !s.send_seen) {
      CmTxInputs in;
      in.pc_at_send = true;
      cm_tx_tick(s, in, r);
    }
    CmTxInputs in;
    in.baud_pulse = true;
    CmTxOut o = cm_tx_tick(s, in, r);
    if (o.byte) out.push_back(*o.byte);
    if (o.slice_done) slice_done = true;
    if (o.report_done) return out;
  }
  FAIL("report never completed");
  return out;
}

}  // namespace

TEST_CASE("trigger bits are one-hot in declaration order") {
  CHECK(trigger_bit(Trigger::T1) == 0x1);
  CHECK(trigger_bit(Trigger::T2) == 0x2);
  CHECK(trigger_bit(Trigger::T3) == 0x4);
  CHECK(trigger_bit(Trigger::T4) == 0x8);
}

TEST_CASE("select_trigger honours T3 > T4 > T2 > T1 and keeps the rest") {
  TriggerLatch l;
  CHECK(select_trigger(l) == std::nullopt);

  l.set(Trigger::T3);
  l.set(Trigger::T4);
  CHECK(select_trigger(l) == Trigger::T3);
  CHECK_FALSE(l.t3);
  CHECK(l.t4);
  CHECK(select_trigger(l) == Trigger::T4);

  l.clear_all();
  l.set(Trigger::T1);
  CHECK(select_trigger(l) == Trigger::T1);

  // Two-step dispatch: T2 first, T1 survives the first selection.
  l.clear_all();
  l.set(Trigger::T2);
  l.set(Trigger::T1);
  CHECK(select_trigger(l) == Trigger::T2);
  CHECK(l.t1);
  CHECK(select_trigger(l) == Trigger::T1);
  CHECK_FALSE(l.any());
}

TEST_CASE("acfa_tick raises T1 at the region end and gates logging") {
  CfLog log(8);
  CpuView cpu;
  cpu.pc = 0x4400;
  AcfaTickOut o = acfa_tick(cpu, 0x4000, 0x4400, log, 0);
  CHECK(o.t1);
  CHECK(o.log_enable);

  cpu.pc = 0x4200;
  cpu.in_tcb = true;
  o = acfa_tick(cpu, 0x4000, 0x4400, log, 0);
  CHECK_FALSE(o.t1);
  CHECK_FALSE(o.log_enable);

  cpu.in_tcb = false;
  cpu.pc = 0x3FFF;
  o = acfa_tick(cpu, 0x4000, 0x4400, log, 0);
  CHECK_FALSE(o.log_enable);

  CHECK_THROWS_AS(acfa_tick(cpu, 0x4400, 0x4400, log, 0),
                  std::invalid_argument);
}

TEST_CASE("acfa_tick raises T4 exactly when the headroom word is consumed") {
  // Scripted 3-branch run on an 8-byte ring, one slice pending the whole
  // time: writes land at 0,2,4 and the step at 6 must find log_full before
  // any word goes down.
  CfLog log(8);
  CpuView cpu;
  cpu.pc = 0x4002;
  uint32_t slice_top = 0;
  std::vector<bool> t4_seen;
  for (int w = 0; w < 4; ++w) {
    AcfaTickOut o = acfa_tick(cpu, 0x4000, 0x4400, log, slice_top);
    t4_seen.push_back(o.t4);
    if (!o.t4) log.append_word(0x1234);
  }
  CHECK(t4_seen == std::vector<bool>{false, false, false, true});
  CHECK(log.log_ptr() == 6);
}

TEST_CASE("acfa_protect blocks untrusted access to every protected region") {
  const ProtRegion protected_regions[] = {
      ProtRegion::TcbCode, ProtRegion::LogRegion, ProtRegion::KeySlot,
      ProtRegion::CaramelData, ProtRegion::CmUartConfig};
  for (ProtRegion r : protected_regions) {
    CAPTURE(prot_region_name(r));
    CHECK_FALSE(acfa_protect(Actor::Untrusted, r, AccessKind::Write));
    CHECK(acfa_protect(Actor::Tcb, r, AccessKind::Write));
    CHECK(acfa_protect(Actor::Tcb, r, AccessKind::Read));
  }
  // Reads are tolerated except for the key.
  CHECK(acfa_protect(Actor::Untrusted, ProtRegion::LogRegion, AccessKind::Read));
  CHECK_FALSE(
      acfa_protect(Actor::Untrusted, ProtRegion::KeySlot, AccessKind::Read));
  CHECK(acfa_protect(Actor::Untrusted, ProtRegion::Other, AccessKind::Write));
}

// ---------------------------------------------------------------------------
// Hand-stepped scenario suites. Each drives the monitors one cycle at a time
// on an 8-byte ring (two 4-byte slices) and pins the full state sequence.
// ---------------------------------------------------------------------------

TEST_CASE("scenario: single-slice cycle ends in a slice report") {
  CfLog log(8);
  SliceMonitorState s;
  s.reset(8, 4);
  CHECK(SliceSnap{s.slice_top, s.slice_bot, s.bound_low, s.vrf_acc,
                  s.slice_full, false} == SliceSnap{0, 0, 4, true, false,
                                                    false});

  CHECK(write_step(s, log, 0x1110) ==
        SliceSnap{0, 0, 4, true, false, false});
  // Second word reaches the boundary: T2, the report spans [0,4), the next
  // boundary wraps to 0 and the monitor is no longer caught up.
  CHECK(write_step(s, log, 0x1312) == SliceSnap{0, 4, 0, false, true, true});

  // Acceptance flips the protected half and re-arms.
  CHECK(accept_step(s, log) == SliceSnap{4, 4, 0, true, false, false});
}

TEST_CASE("scenario: execution end cuts a partial slice at the write head") {
  CfLog log(8);
  SliceMonitorState s;
  s.reset(8, 4);

  CHECK(write_step(s, log, 0xAAAA) ==
        SliceSnap{0, 0, 4, true, false, false});

  // T1 with the verifier caught up bounds the final report at log_ptr.
  SliceMonitorInputs in;
  in.t1 = true;
  CHECK(step(s, log.log_ptr(), in) == SliceSnap{0, 2, 4, true, false, false});

  // The resulting report carries 2 slice bytes plus the 36-byte trailer.
  ReportRegion r;
  r.log = &log;
  r.slice_top = 0;
  r.slice_bot = 2;
  CHECK(encode_report_stream(r).size() == 2 + 36);
}

TEST_CASE("scenario: double fill raises T4 then resumes after acceptance") {
  CfLog log(8);
  SliceMonitorState s;
  s.reset(8, 4);

  // Slice 1 fills and is reported.
  CHECK(write_step(s, log, 1) == SliceSnap{0, 0, 4, true, false, false});
  CHECK(write_step(s, log, 2) == SliceSnap{0, 4, 0, false, true, true});

  // Slice 2 takes one more word; the next write would consume the headroom
  // word in front of the pending slice, so the full condition must hold
  // before it lands.
  CHECK(write_step(s, log, 3) == SliceSnap{0, 4, 0, false, false, false});
  CHECK(log.log_ptr() == 6);
  CHECK(is_log_full(log, s.slice_top));
  CHECK_THROWS_AS(log.append_word(4, s.slice_top), AppendWhileFull);

  // Acceptance of the slice-1 report unblocks the writer...
  CHECK(accept_step(s, log) == SliceSnap{4, 4, 0, true, false, false});
  CHECK_FALSE(is_log_full(log, s.slice_top));

  // ...and the deferred word completes slice 2, which reports immediately.
  CHECK(write_step(s, log, 4) == SliceSnap{4, 0, 4, false, true, true});
}

TEST_CASE("scenario: pending execution-end report waits behind slice reports") {
  CfLog log(8);
  SliceMonitorState s;
  s.reset(8, 4);
  for (uint16_t w : {0x0101, 0x0202}) write_step(s, log, w);  // T2 #1 fired
  CHECK_FALSE(s.vrf_acc);

  ReportRegion r;
  r.log = &log;
  r.slice_top = 0;
  r.slice_bot = 4;
  for (size_t i = 0; i < r.prv_auth.size(); ++i)
    r.prv_auth[i] = static_cast<uint8_t>(i);

  CmTxState cm;
  CmTxInputs in;
  in.t2 = true;
  in.vrf_acc = true;  // sampled before the emission cleared it
  CmTxOut o = cm_tx_tick(cm, in, r);
  CHECK(o.stream_started);
  CHECK(cm.t2_pend);

  // Execution ends while the slice-1 report is still streaming: t1 latches
  // but may not start a stream (no acceptance yet).
  in = CmTxInputs{};
  in.t1 = true;
  o = cm_tx_tick(cm, in, r);
  CHECK_FALSE(o.stream_started);
  CHECK(cm.t1_pend);
  CHECK(cm.t2_pend);

  // Slice-1 report runs to completion; it serves the T2 pend, not the T1.
  std::vector<uint8_t> wire = pump_report(cm, r);
  CHECK(wire.size() == 4 + 36);
  CHECK_FALSE(cm.t2_pend);
  CHECK(cm.t1_pend);
  CHECK_FALSE(cm.active());

  // Acceptance arrives; the engine re-presents the latched T1 and the final
  // partial report [4, 6) streams.
  accept_step(s, log);
  write_step(s, log, 0x0303);
  SliceMonitorInputs smin;
  smin.t1 = true;
  step(s, log.log_ptr(), smin);
  CHECK(s.slice_bot == 6);

  r.slice_top = 4;
  r.slice_bot = 6;
  in = CmTxInputs{};
  in.vrf_acc = true;
  o = cm_tx_tick(cm, in, r);
  CHECK(o.stream_started);
  wire = pump_report(cm, r);
  CHECK(wire.size() == 2 + 36);
  CHECK_FALSE(cm.t1_pend);
  CHECK_FALSE(cm.tx_pend());
}

TEST_CASE("cm_tx streams the slice first and the trailer after send_addr") {
  CfLog log(8);
  log.append_word(0x1110);
  log.append_word(0x1312);
  ReportRegion r;
  r.log = &log;
  r.slice_top = 0;
  r.slice_bot = 4;
  for (size_t i = 0; i < r.prv_auth.size(); ++i)
    r.prv_auth[i] = static_cast<uint8_t>(0xA0 + i);

  CmTxState s;
  CmTxInputs in;
  in.t2 = true;
  in.vrf_acc = true;
  CHECK(cm_tx_tick(s, in, r).stream_started);
  CHECK(s.read_idx == 0);

  // Slice bytes flow on baud pulses with no send_addr visit yet.
  in = CmTxInputs{};
  in.baud_pulse = true;
  CmTxOut o = cm_tx_tick(s, in, r);
  CHECK(o.byte == 0x10);
  for (int i = 0; i < 3; ++i) o = cm_tx_tick(s, in, r);
  CHECK(o.byte == 0x13);
  CHECK(o.slice_done);

  // Without the send_addr visit nothing more comes out.
  o = cm_tx_tick(s, in, r);
  CHECK_FALSE(o.byte.has_value());

  // The visit releases the trailer: slice_top, slice_bot, then the tag.
  CmTxInputs visit;
  visit.pc_at_send = true;
  cm_tx_tick(s, visit, r);
  std::vector<uint8_t> trailer;
  for (int i = 0; i < 36; ++i) {
    o = cm_tx_tick(s, in, r);
    REQUIRE(o.byte.has_value());
    trailer.push_back(*o.byte);
  }
  CHECK(o.report_done);
  CHECK(trailer[0] == 0x00);
  CHECK(trailer[2] == 0x04);
  CHECK(trailer[4] == 0xA0);
  CHECK(trailer[35] == 0xBF);
}

TEST_CASE("cm_tx send_addr visit is latched across a slow wire") {
  CfLog log(8);
  log.append_word(7);
  log.append_word(9);
  ReportRegion r;
  r.log = &log;
  r.slice_top = 0;
  r.slice_bot = 4;

  CmTxState s;
  CmTxInputs in;
  in.t2 = true;
  in.vrf_acc = true;
  cm_tx_tick(s, in, r);

  // MAC finishes while the slice is still streaming: the visit arrives
  // before slice_done and must be remembered.
  in = CmTxInputs{};
  in.pc_at_send = true;
  cm_tx_tick(s, in, r);
  CHECK(s.send_seen);

  in = CmTxInputs{};
  in.baud_pulse = true;
  int bytes = 0;
  for (int i = 0; i < 200; ++i) {
    CmTxOut o = cm_tx_tick(s, in, r);
    if (o.byte) ++bytes;
    if (o.report_done) break;
  }
  CHECK(bytes == 4 + 36);
}

TEST_CASE("cm_tx wrapped slice emits the upper half then the lower") {
  CfLog log(2048);
  for (int i = 0; i < 1024; ++i) log.append_word(static_cast<uint16_t>(i));
  ReportRegion r;
  r.log = &log;
  r.slice_top = 1024;
  r.slice_bot = 0;

  CmTxState s;
  CmTxInputs in;
  in.t1 = true;
  in.vrf_acc = true;
  cm_tx_tick(s, in, r);
  std::vector<uint8_t> wire = pump_report(s, r, true);
  REQUIRE(wire.size() == 1024 + 36);
  for (uint32_t i = 0; i < 1024; ++i)
    REQUIRE(wire[i] == log.byte_at(1024 + i));
}

TEST_CASE("cm_tx empty slice report is trailer-only") {
  CfLog log(8);
  ReportRegion r;
  r.log = &log;
  r.slice_top = 4;
  r.slice_bot = 4;

  CmTxState s;
  CmTxInputs in;
  in.t1 = true;
  in.vrf_acc = true;
  CmTxOut o = cm_tx_tick(s, in, r);
  CHECK(o.stream_started);
  CHECK(o.slice_done);
  CHECK(s.finish_cflog);
  CHECK_FALSE(s.start_cflog);
  std::vector<uint8_t> wire = pump_report(s, r, true);
  CHECK(wire.size() == 36);
}

TEST_CASE("cm_tx retransmission replays the span without a fresh tag visit") {
  CfLog log(8);
  log.append_word(0x2221);
  log.append_word(0x2423);
  ReportRegion r;
  r.log = &log;
  r.slice_top = 0;
  r.slice_bot = 4;
  r.prv_auth.fill(0x33);

  CmTxState s;
  CmTxInputs in;
  in.t1 = true;
  in.vrf_acc = true;
  cm_tx_tick(s, in, r);
  std::vector<uint8_t> first = pump_report(s, r, true);
  CHECK(s.t1_pend == false);

  // Replay: no pend flags, no send_addr; the stored report streams again.
  in = CmTxInputs{};
  in.begin_retransmission = true;
  CmTxOut o = cm_tx_tick(s, in, r);
  CHECK(o.stream_started);
  CHECK(s.retransmit);
  std::vector<uint8_t> second;
  in = CmTxInputs{};
  in.baud_pulse = true;
  for (int i = 0; i < 200; ++i) {
    o = cm_tx_tick(s, in, r);
    if (o.byte) second.push_back(*o.byte);
    if (o.report_done) break;
  }
  CHECK(second == first);
  CHECK_FALSE(s.tx_pend());
}

TEST_CASE("cm_rx assembles 66-byte frames and strobes on the last byte") {
  CmRxState s;
  for (int i = 0; i < 65; ++i) {
    CHECK_FALSE(cm_rx_byte(s, static_cast<uint8_t>(i)));
  }
  CHECK(s.write_idx == 65);
  CHECK(cm_rx_byte(s, 0xFF));
  CHECK(s.write_idx == 0);
  CHECK(s.buf[0] == 0);
  CHECK(s.buf[64] == 64);
  CHECK(s.buf[65] == 0xFF);

  // Back-to-back frames: exactly two strobes, second frame intact.
  int strobes = 0;
  for (int rep = 0; rep < 2; ++rep) {
    for (int i = 0; i < 66; ++i) {
      if (cm_rx_byte(s, static_cast<uint8_t>(rep + 1))) ++strobes;
    }
  }
  CHECK(strobes == 2);
  CHECK(s.buf[0] == 2);
  CHECK(s.buf[65] == 2);
}
