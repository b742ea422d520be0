#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfaudit/channel.hpp"
#include "cfaudit/monitors.hpp"
#include "cfaudit/tcb.hpp"
#include "cfaudit/trace.hpp"
#include "cfaudit/verifier.hpp"
#include "cfaudit/workload.hpp"

namespace cfaudit {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// BestEffort: log-and-hope baseline, never stalls, no verifier traffic.
// Acfa: one whole-buffer slice; the device halts through every report cycle.
// Caramel: two half-buffer slices; streaming overlaps execution.
enum class Mode : uint8_t { BestEffort, Acfa, Caramel };

const char* mode_name(Mode m);

// Scripted untrusted access attempt, evaluated when the given branch retires.
struct FaultInjection {
  uint64_t at_branch = 1;
  ProtRegion region = ProtRegion::KeySlot;
  AccessKind kind = AccessKind::Write;
};

struct SimConfig {
  Mode mode = Mode::Caramel;
  uint32_t cf_size = 2048;
  // Test hook: run Caramel mode with one slice spanning the buffer. Must
  // reproduce Acfa mode bit for bit.
  bool force_single_slice = false;

  WorkloadConfig workload;
  LinkConfig link;
  TcbConfig tcb;
  int64_t dispatch_ns = 200'000;  // fixed TCB entry cost
  int64_t horizon_ns = 60'000'000'000;
  uint64_t seed = 1;
  std::vector<AdvRule> adversary;
  std::vector<FaultInjection> faults;
  std::string preset_name = "custom";
};

enum class EndReason : uint8_t { Completed, Healed, HorizonExceeded };

const char* end_reason_name(EndReason r);

struct Metrics {
  double t_app = 0.0;   // seconds executing application code
  double t_tcb = 0.0;   // seconds in attestation / response parsing
  double t_wait = 0.0;  // seconds stalled on a full log or busy-wait
  std::array<uint64_t, 4> trigger_counts{};  // T1..T4
  uint64_t bytes_tx = 0;  // report bytes the prover put on the wire
  uint64_t bytes_rx = 0;  // response bytes that reached the prover UART
  uint64_t authfail_count = 0;
  double total_runtime = 0.0;
  double utilization = 0.0;
  double overhead_vs_baseline = 0.0;  // filled against a baseline run
};

struct RunResult {
  Metrics metrics;
  EndReason reason = EndReason::Completed;
  Trace trace;
  VerifierStats verifier;
  uint64_t retransmissions = 0;
  uint64_t violations = 0;
  uint64_t reports_delivered = 0;
  uint64_t accepted_report_bytes = 0;  // wire bytes of accepted reports
  // Reassembled accepted transfers; filled when the session closed cleanly.
  std::vector<Transfer> audit_trail;
};

RunResult run_simulation(const SimConfig& cfg);

// Percent runtime increase relative to a stall-free baseline of the same
// workload and seed.
double compute_overhead(const Metrics& m, const Metrics& baseline);

// Percent utilization increase relative to the halt-style run.
double compute_utilization_gain(const Metrics& m, const Metrics& acfa);

}  // namespace cfaudit
