#pragma once

#include <cstdint>
#include <deque>

#include "cfaudit/core_log.hpp"
#include "cfaudit/crypto.hpp"
#include "cfaudit/frames.hpp"
#include "cfaudit/monitors.hpp"
#include "cfaudit/tcb.hpp"

namespace cfaudit {

struct DeviceConfig {
  uint32_t cf_size = 2048;
  uint32_t slice_size = 1024;
  bool single_slice = false;  // whole-buffer slice: halt-style auditing
  uint16_t aer_min = 0x0400;
  uint16_t aer_max = 0x0800;
  TcbConfig tcb{};
};

// The prover: circular log, monitors, contention-monitor UART halves and the
// TCB's in-memory regions, glued together by the simulation engine. Plain
// state plus the word-level append path; scheduling lives in the engine.
class Device {
 public:
  Device(const DeviceConfig& cfg, const Key& key, const Challenge& chal0);

  Device(const Device&) = delete;
  Device& operator=(const Device&) = delete;

  DeviceConfig cfg;
  CfLog log;
  SliceMonitorState slice;
  CmTxState cm_tx;
  CmRxState cm_rx;
  TriggerLatch latch;
  TcbContext tcb;
  ReportRegion report;

  // Words of a transfer that could not land because the log was full. A
  // transfer is two words and the full check runs per word, so a report
  // boundary can fall mid-transfer.
  std::deque<uint16_t> held;
  uint64_t next_branch = 1;

  bool log_full() const { return is_log_full(log, slice.slice_top); }

  void queue_transfer(const Transfer& t);

  struct DrainOut {
    bool t2 = false;       // a slice filled while words landed
    bool blocked = false;  // words remain; T4 condition holds
  };
  // Lands queued words until empty or the log fills.
  DrainOut drain();

  // Untrusted-access violation: application state is wiped, the key and the
  // current challenge survive, and the run starts over from the first branch.
  void violation_reset();
};

}  // namespace cfaudit
