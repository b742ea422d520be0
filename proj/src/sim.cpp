#include "cfaudit/sim.hpp"

#include <cmath>
#include <optional>
#include <queue>

#include "cfaudit/device.hpp"

namespace cfaudit {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::BestEffort: return "besteffort";
    case Mode::Acfa: return "acfa";
    case Mode::Caramel: return "caramel";
  }
  return "?";
}

const char* end_reason_name(EndReason r) {
  switch (r) {
    case EndReason::Completed: return "completed";
    case EndReason::Healed: return "healed";
    case EndReason::HorizonExceeded: return "horizon";
  }
  return "?";
}

double compute_overhead(const Metrics& m, const Metrics& baseline) {
  if (baseline.total_runtime <= 0.0) {
    throw std::invalid_argument("baseline runtime must be positive");
  }
  return 100.0 * (m.total_runtime - baseline.total_runtime) /
         baseline.total_runtime;
}

double compute_utilization_gain(const Metrics& m, const Metrics& acfa) {
  if (acfa.utilization <= 0.0) {
    throw std::invalid_argument("reference utilization must be positive");
  }
  return 100.0 * (m.utilization - acfa.utilization) / acfa.utilization;
}

namespace {

enum class EvKind : uint8_t {
  Horizon,
  AppBranch,
  TcbDone,
  TxPulse,
  PtovDeliver,
  RxByte,
  RetransTimer,
};

struct Ev {
  int64_t t = 0;
  uint64_t seq = 0;
  EvKind kind = EvKind::Horizon;
  uint64_t a = 0;  // generation / epoch / pool index
  uint64_t b = 0;  // branch index / byte value
};

struct EvLater {
  bool operator()(const Ev& x, const Ev& y) const {
    if (x.t != y.t) return x.t > y.t;
    return x.seq > y.seq;
  }
};

enum class Phase : uint8_t { Running, InTcb, Waiting, Done, Halted };

int64_t ns_of_bytes(double rate, double nbytes) {
  return static_cast<int64_t>(
      llroundl(static_cast<long double>(nbytes) * 1e9L /
               static_cast<long double>(rate)));
}

Key derive_key(uint64_t seed) {
  Key key{};
  uint64_t s = splitmix64(seed ^ 0x6b65795f73656564ULL);
  for (size_t i = 0; i < key.size(); i += 8) {
    uint64_t v = splitmix64(s + i);
    for (size_t k = 0; k < 8; ++k) {
      key[i + k] = static_cast<uint8_t>(v >> (8 * k));
    }
  }
  return key;
}

DeviceConfig device_config(const SimConfig& cfg) {
  DeviceConfig dc;
  dc.cf_size = cfg.cf_size;
  dc.single_slice = (cfg.mode == Mode::Acfa) || cfg.force_single_slice;
  dc.slice_size = dc.single_slice ? cfg.cf_size : cfg.cf_size / 2;
  dc.aer_min = cfg.workload.aer_min;
  dc.aer_max = cfg.workload.aer_max;
  dc.tcb = cfg.tcb;
  return dc;
}

class Engine {
 public:
  explicit Engine(const SimConfig& cfg)
      : cfg_(cfg),
        wl_(cfg.workload),
        key_(derive_key(cfg.seed)),
        vrf_(key_, cfg.workload.aer_min, cfg.workload.aer_max, wl_.policy(),
             splitmix64(cfg.seed ^ 0x76726620726e67ULL)),
        chan_(cfg.link, cfg.adversary,
              splitmix64(cfg.seed ^ 0x6368616e20726eULL)),
        dev_(device_config(cfg), key_, vrf_.current_chal()),
        faults_(cfg.faults) {}

  RunResult run();

 private:
  void schedule(int64_t t, EvKind kind, uint64_t a = 0, uint64_t b = 0) {
    q_.push(Ev{t, seq_++, kind, a, b});
  }

  bool ended() const { return phase_ == Phase::Done || phase_ == Phase::Halted; }

  // --- accounting -----------------------------------------------------------

  void transition(Phase want) {
    if (want == phase_) return;
    if (phase_ == Phase::Running) app_clock_ += now_ - running_since_;
    bucket_of(phase_) += now_ - phase_since_;
    phase_ = want;
    phase_since_ = now_;
    if (want == Phase::Running) {
      running_since_ = now_;
    } else if (want == Phase::Waiting) {
      ++wait_epoch_;
      // A zero-latency link gives the timeout no period; leave it unarmed
      // rather than spinning at the current timestamp.
      if (cfg_.link.rtt_ns > 0) {
        schedule(now_ + 2 * cfg_.link.rtt_ns, EvKind::RetransTimer,
                 wait_epoch_);
      }
    }
  }

  int64_t& bucket_of(Phase p) {
    switch (p) {
      case Phase::Running: return app_ns_;
      case Phase::InTcb: return tcb_ns_;
      default: return wait_ns_;
    }
  }

  void finish(EndReason reason, const char* kind) {
    trace_.emit(now_, kind);
    reason_ = reason;
    transition(reason == EndReason::Healed ? Phase::Halted : Phase::Done);
  }

  // --- trigger plumbing -----------------------------------------------------

  void pulse(Trigger t) {
    trig_counts_[static_cast<size_t>(t)]++;
    trace_.emit(now_, trigger_name(t));
    dev_.latch.set(t);
  }

  std::optional<Trigger> pick_dispatch() {
    TriggerLatch& l = dev_.latch;
    if (l.t3 || l.t4 || l.t2) return select_trigger(l);
    // The final report can only go out once the verifier is caught up; until
    // then T1 stays latched.
    if (l.t1 && dev_.slice.vrf_acc) return select_trigger(l);
    return std::nullopt;
  }

  Phase desired_phase() const {
    if (!dev_.held.empty()) return Phase::Waiting;  // blocked on a full log
    if (dev_.next_branch <= wl_.total_branches()) return Phase::Running;
    return Phase::Waiting;  // execution done, session still open
  }

  // Single choke point run after every event: dispatch whatever the latch
  // holds, otherwise settle into the right phase and (re)arm its event.
  void settle() {
    if (ended()) return;
    if (phase_ == Phase::InTcb) return;  // TcbDone will settle again
    if (auto trig = pick_dispatch()) {
      dispatch(*trig);
      return;
    }
    transition(desired_phase());
    if (phase_ == Phase::Running) {
      // Re-arming must be idempotent: anchor on app progress as of now so a
      // settle mid-interval (e.g. per received byte) targets the same time.
      ++app_gen_;
      uint64_t k = dev_.next_branch;
      int64_t consumed = app_clock_ + (now_ - running_since_);
      schedule(now_ + (wl_.branch_time_ns(k) - consumed), EvKind::AppBranch,
               app_gen_, k);
    }
  }

  // --- TCB dispatch ---------------------------------------------------------

  void dispatch(Trigger trig) {
    TcbProcedure proc = tcb_enter(trig);
    // A full log with the verifier caught up means no report is in flight to
    // wait for: the whole-buffer slice gets attested right here (the
    // single-slice operating point; unreachable with two slices, where a
    // slice boundary always precedes the full condition).
    if (trig == Trigger::T4 && dev_.slice.vrf_acc) {
      proc = TcbProcedure::Attestation;
    }
    trace_.emit(now_, "dispatch", trigger_name(trig));
    cur_trig_ = trig;
    cur_proc_ = proc;
    int64_t dur = cfg_.dispatch_ns;

    switch (proc) {
      case TcbProcedure::Attestation: {
        if (trig == Trigger::T1) {
          SliceMonitorInputs in;
          in.t1 = true;  // re-present at dispatch: bound the final slice now
          slice_monitor_tick(dev_.slice, dev_.log.log_ptr(), in);
        } else if (trig == Trigger::T4) {
          dev_.slice.slice_bot = static_cast<uint16_t>(dev_.log.log_ptr());
        }
        dev_.report.slice_top = static_cast<uint16_t>(dev_.slice.slice_top);
        dev_.report.slice_bot = static_cast<uint16_t>(dev_.slice.slice_bot);
        // Slice bytes start flowing while the MAC runs; the trailer waits for
        // the send_addr visit. Every attestation dispatch happens with the
        // verifier caught up (T2 and T1 gate on vrf_acc; the full-log report
        // requires it too), so the stream may start immediately.
        CmTxInputs in;
        in.vrf_acc = true;
        if (trig == Trigger::T1) {
          in.t1 = true;
        } else {
          in.t2 = true;  // slice-report path, also used by the full-log report
        }
        CmTxOut out = cm_tx_tick(dev_.cm_tx, in, dev_.report);
        if (out.stream_started) start_tx_chain();
        dev_.slice.vrf_acc = false;
        outstanding_ = trig;
        uint32_t slice_len = wrapped_distance(
            dev_.report.slice_top, dev_.report.slice_bot, cfg_.cf_size);
        size_t aer_len = static_cast<size_t>(cfg_.workload.aer_max) -
                         cfg_.workload.aer_min;
        // MAC charge covers hashing the measured region plus the report MAC
        // input (42-byte header, slice, 32-byte region digest).
        dur += ns_of_bytes(cfg_.tcb.mac_rate,
                           static_cast<double>(aer_len + 42 + slice_len + 32));
        break;
      }
      case TcbProcedure::ResponseParser: {
        resp_snapshot_.assign(dev_.cm_rx.buf.begin(), dev_.cm_rx.buf.end());
        dur += ns_of_bytes(cfg_.tcb.mac_rate, ResponseFrame::kWireSize);
        break;
      }
      case TcbProcedure::Wait:
        break;  // entry cost only; settle() parks the device
    }

    transition(Phase::InTcb);
    schedule(now_ + dur, EvKind::TcbDone, tcb_gen_);
  }

  void on_tcb_done(uint64_t gen) {
    if (gen != tcb_gen_ || phase_ != Phase::InTcb) return;
    switch (cur_proc_) {
      case TcbProcedure::Attestation: {
        AttestResult res =
            tcb_attest(dev_.tcb, dev_.log, cur_trig_, dev_.report.slice_top,
                       dev_.report.slice_bot);
        dev_.report.prv_auth = res.prv_auth;
        trace_.emit(now_, "visit", "send_addr");
        CmTxInputs in;
        in.pc_at_send = true;
        cm_tx_tick(dev_.cm_tx, in, dev_.report);
        break;
      }
      case TcbProcedure::ResponseParser: {
        ResponseFrame resp = decode_response(resp_snapshot_);
        ParseVerdict v = tcb_parse_response(dev_.tcb, resp);
        trace_.emit(now_, "parse", parse_verdict_name(v));
        if (v == ParseVerdict::AuthFail) {
          ++authfail_;
        } else if (v == ParseVerdict::Rejected) {
          trace_.emit(now_, "heal", heal_action_name(cfg_.tcb.heal_action));
          finish(EndReason::Healed, "halted");
          return;
        } else {
          on_accept();
          if (ended()) return;
        }
        break;
      }
      case TcbProcedure::Wait:
        break;
    }
    // This entry is over; leave InTcb so settle() can dispatch a latched
    // trigger or re-arm the app/wait machinery.
    transition(desired_phase());
    settle();
  }

  void on_accept() {
    // Duplicate responses are byte-identical, so a second Accepted parse for
    // an already-answered report must not move the slice registers again.
    if (!outstanding_) {
      trace_.emit(now_, "stale_accept");
      return;
    }
    Trigger answered = *outstanding_;
    outstanding_.reset();
    trace_.emit(now_, "visit", "accepted_addr");
    SliceMonitorInputs in;
    in.pc_at_accepted = true;
    slice_monitor_tick(dev_.slice, dev_.log.log_ptr(), in);
    if (answered == Trigger::T1) {
      finish(EndReason::Completed, "session_complete");
      return;
    }
    if (dev_.cfg.single_slice) {
      // Acceptance hands the whole buffer back.
      dev_.log.set_log_ptr(dev_.slice.slice_top);
    }
    Device::DrainOut d = dev_.drain();
    if (d.t2) pulse(Trigger::T2);
    if (d.blocked) {
      if (!dev_.latch.t4) pulse(Trigger::T4);
    } else if (branch_pending_) {
      uint64_t k = *branch_pending_;
      complete_branch(k);
    }
  }

  void complete_branch(uint64_t k) {
    dev_.next_branch = k + 1;
    branch_pending_.reset();
    if (k == wl_.total_branches()) {
      // Execution reached the exit stub.
      pulse(Trigger::T1);
      SliceMonitorInputs in;
      in.t1 = true;
      slice_monitor_tick(dev_.slice, dev_.log.log_ptr(), in);
    }
  }

  // --- application ----------------------------------------------------------

  void on_app_branch(uint64_t gen, uint64_t k) {
    if (gen != app_gen_ || phase_ != Phase::Running || k != dev_.next_branch) {
      return;
    }
    app_clock_ = wl_.branch_time_ns(k);
    running_since_ = now_;

    for (auto it = faults_.begin(); it != faults_.end(); ++it) {
      if (it->at_branch == k) {
        FaultInjection f = *it;
        faults_.erase(it);
        if (cfg_.mode != Mode::BestEffort &&
            !acfa_protect(Actor::Untrusted, f.region, f.kind)) {
          do_violation(f);
          return;
        }
        break;
      }
    }

    if (cfg_.mode == Mode::BestEffort) {
      if (k == wl_.total_branches()) {
        finish(EndReason::Completed, "app_done");
        return;
      }
      dev_.next_branch = k + 1;
      settle();
      return;
    }

    dev_.queue_transfer(wl_.transfer(k));
    Device::DrainOut d = dev_.drain();
    if (d.t2) pulse(Trigger::T2);
    if (d.blocked) {
      pulse(Trigger::T4);
      branch_pending_ = k;
    } else {
      complete_branch(k);
    }
    settle();
  }

  void do_violation(const FaultInjection& f) {
    ++violations_;
    trace_.emit(now_, "violation",
                std::string(prot_region_name(f.region)) + " " +
                    access_kind_name(f.kind));
    trace_.emit(now_, "device_reset");
    dev_.violation_reset();
    chan_.ptov_abort();
    ++app_gen_;
    ++tcb_gen_;
    ++tx_gen_;
    ++rx_gen_;
    branch_pending_.reset();
    outstanding_.reset();
    resp_snapshot_.clear();
    report_done_ns_ = -1;
    app_clock_ = 0;
    running_since_ = now_;
    settle();
  }

  // --- report streaming -----------------------------------------------------

  void start_tx_chain() {
    ++tx_gen_;
    schedule(now_ + chan_.byte_ns(), EvKind::TxPulse, tx_gen_);
  }

  void on_tx_pulse(uint64_t gen) {
    if (gen != tx_gen_) return;
    CmTxInputs in;
    in.baud_pulse = true;
    in.vrf_acc = dev_.slice.vrf_acc;
    CmTxOut out = cm_tx_tick(dev_.cm_tx, in, dev_.report);
    if (out.byte) {
      chan_.ptov_push_byte(*out.byte);
      ++bytes_tx_;
    }
    if (out.report_done) {
      ++tx_gen_;  // chain ends with the report
      report_done_ns_ = now_;
      uint16_t declared = dev_.tcb.meta.trigger_state;
      uint32_t len = wrapped_distance(dev_.report.slice_top,
                                      dev_.report.slice_bot, cfg_.cf_size) +
                     ReportRegion::kTrailerSize;
      trace_.emit(now_, "report_tx",
                  "len=" + std::to_string(len) +
                      " trig=" + std::to_string(declared));
      for (PtovDelivery& d : chan_.ptov_close(now_, declared)) {
        ptov_pool_.push_back(std::move(d));
        schedule(ptov_pool_.back().arrive_ns, EvKind::PtovDeliver,
                 ptov_pool_.size() - 1);
      }
    } else if (dev_.cm_tx.active() || dev_.cm_tx.finish_cflog) {
      schedule(now_ + chan_.byte_ns(), EvKind::TxPulse, gen);
    }
  }

  // --- verifier side --------------------------------------------------------

  void on_ptov_deliver(uint64_t idx) {
    const PtovDelivery& d = ptov_pool_[idx];
    ++reports_delivered_;
    VrfVerdict v =
        vrf_.vrf_validate_report(d.bytes, d.declared_trigger_state);
    trace_.emit(now_, "report_rx",
                std::string(vrf_verdict_name(v)) +
                    " len=" + std::to_string(d.bytes.size()));
    if (v == VrfVerdict::Accept) accepted_report_bytes_ += d.bytes.size();
    if (v == VrfVerdict::Malformed) {
      settle();
      return;
    }
    ResponseFrame frame = vrf_.vrf_make_response(v);
    trace_.emit(now_, "resp_tx", "check=" + std::to_string(frame.vrf_check));
    for (const VtopDelivery& del : chan_.vtop_send(frame, now_)) {
      for (size_t k = 0; k < del.bytes.size(); ++k) {
        schedule(del.start_ns + tx_duration_ns(cfg_.link, k + 1),
                 EvKind::RxByte, rx_gen_, del.bytes[k]);
      }
    }
    settle();
  }

  void on_rx_byte(uint64_t gen, uint8_t byte) {
    if (gen != rx_gen_) return;
    ++bytes_rx_;
    if (cm_rx_byte(dev_.cm_rx, byte)) pulse(Trigger::T3);
    settle();
  }

  // --- busy-wait retransmission ----------------------------------------------

  void on_retrans_timer(uint64_t epoch) {
    if (phase_ != Phase::Waiting || epoch != wait_epoch_) return;
    bool report_on_wire = dev_.cm_tx.active() || dev_.cm_tx.finish_cflog;
    bool response_inbound = dev_.cm_rx.write_idx != 0;
    // The round trip is measured from the end of the report transmission,
    // not from when the device started waiting (it may wait while the tail
    // of the report is still on the wire).
    if (report_done_ns_ >= 0 && now_ - report_done_ns_ < 2 * cfg_.link.rtt_ns) {
      schedule(report_done_ns_ + 2 * cfg_.link.rtt_ns, EvKind::RetransTimer,
               epoch);
      return;
    }
    if (outstanding_ && !dev_.slice.vrf_acc && !report_on_wire &&
        !response_inbound) {
      ++retrans_;
      trace_.emit(now_, "retransmit", trigger_name(*outstanding_));
      CmTxInputs in;
      in.begin_retransmission = true;
      CmTxOut out = cm_tx_tick(dev_.cm_tx, in, dev_.report);
      if (out.stream_started) start_tx_chain();
    }
    if (cfg_.link.rtt_ns > 0) {
      schedule(now_ + 2 * cfg_.link.rtt_ns, EvKind::RetransTimer, epoch);
    }
  }

  // --- members ---------------------------------------------------------------

  SimConfig cfg_;
  Workload wl_;
  Key key_;
  Verifier vrf_;
  Channel chan_;
  Device dev_;
  Trace trace_;

  std::priority_queue<Ev, std::vector<Ev>, EvLater> q_;
  uint64_t seq_ = 0;
  std::vector<PtovDelivery> ptov_pool_;
  std::vector<FaultInjection> faults_;

  Phase phase_ = Phase::Running;
  int64_t now_ = 0;
  int64_t phase_since_ = 0;
  int64_t running_since_ = 0;
  int64_t app_clock_ = 0;
  int64_t app_ns_ = 0, tcb_ns_ = 0, wait_ns_ = 0;

  uint64_t app_gen_ = 0, tcb_gen_ = 0, tx_gen_ = 0, rx_gen_ = 0;
  uint64_t wait_epoch_ = 0;
  int64_t report_done_ns_ = -1;  // completion of the most recent report

  Trigger cur_trig_ = Trigger::T1;
  TcbProcedure cur_proc_ = TcbProcedure::Wait;
  std::vector<uint8_t> resp_snapshot_;
  std::optional<Trigger> outstanding_;   // trigger of the unanswered report
  std::optional<uint64_t> branch_pending_;  // branch stuck on a full log

  EndReason reason_ = EndReason::Completed;
  std::array<uint64_t, 4> trig_counts_{};
  uint64_t bytes_tx_ = 0, bytes_rx_ = 0, authfail_ = 0;
  uint64_t retrans_ = 0, violations_ = 0;
  uint64_t reports_delivered_ = 0, accepted_report_bytes_ = 0;
};

RunResult Engine::run() {
  schedule(cfg_.horizon_ns, EvKind::Horizon);
  settle();

  while (!q_.empty() && !ended()) {
    Ev e = q_.top();
    q_.pop();
    now_ = e.t;
    if (e.kind == EvKind::Horizon) {
      trace_.emit(now_, "horizon");
      reason_ = EndReason::HorizonExceeded;
      break;
    }
    switch (e.kind) {
      case EvKind::AppBranch: on_app_branch(e.a, e.b); break;
      case EvKind::TcbDone: on_tcb_done(e.a); break;
      case EvKind::TxPulse: on_tx_pulse(e.a); break;
      case EvKind::PtovDeliver: on_ptov_deliver(e.a); break;
      case EvKind::RxByte: on_rx_byte(e.a, static_cast<uint8_t>(e.b)); break;
      case EvKind::RetransTimer: on_retrans_timer(e.a); break;
      case EvKind::Horizon: break;
    }
  }
  if (!ended() && reason_ == EndReason::Completed) {
    throw std::logic_error("simulation ran dry before the session closed");
  }
  if (!ended()) {
    // Horizon: flush the open interval into the current phase's bucket.
    bucket_of(phase_) += now_ - phase_since_;
    phase_since_ = now_;
  }

  RunResult rr;
  int64_t total_ns = app_ns_ + tcb_ns_ + wait_ns_;
  rr.metrics.t_app = app_ns_ / 1e9;
  rr.metrics.t_tcb = tcb_ns_ / 1e9;
  rr.metrics.t_wait = wait_ns_ / 1e9;
  rr.metrics.total_runtime = total_ns / 1e9;
  rr.metrics.utilization =
      total_ns > 0 ? static_cast<double>(app_ns_) / total_ns : 0.0;
  rr.metrics.trigger_counts = trig_counts_;
  rr.metrics.bytes_tx = bytes_tx_;
  rr.metrics.bytes_rx = bytes_rx_;
  rr.metrics.authfail_count = authfail_;
  rr.reason = reason_;
  rr.trace = std::move(trace_);
  rr.verifier = vrf_.stats();
  rr.retransmissions = retrans_;
  rr.violations = violations_;
  rr.reports_delivered = reports_delivered_;
  rr.accepted_report_bytes = accepted_report_bytes_;
  if (vrf_.session_complete()) rr.audit_trail = vrf_.vrf_reassemble();
  return rr;
}

}  // namespace

RunResult run_simulation(const SimConfig& cfg) {
  if (cfg.cf_size < 8 || cfg.cf_size % 4 != 0) {
    throw ConfigError("cf_size must be a multiple of 4, at least 8");
  }
  if (cfg.mode == Mode::Caramel && !cfg.force_single_slice &&
      cfg.cf_size % 8 != 0) {
    throw ConfigError("two half-buffer slices need cf_size divisible by 8");
  }
  if (cfg.link.baud == 0) throw ConfigError("baud must be positive");
  if (cfg.link.rtt_ns < 0) throw ConfigError("rtt must be non-negative");
  if (cfg.tcb.mac_rate <= 0.0) throw ConfigError("mac_rate must be positive");
  if (cfg.dispatch_ns < 0) throw ConfigError("dispatch cost must be >= 0");
  if (cfg.horizon_ns <= 0) throw ConfigError("horizon must be positive");
  try {
    Engine engine(cfg);
    return engine.run();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace cfaudit
