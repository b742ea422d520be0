#include "cfaudit/device.hpp"

namespace cfaudit {

Device::Device(const DeviceConfig& c, const Key& key, const Challenge& chal0)
    : cfg(c), log(c.cf_size) {
  slice.reset(cfg.cf_size, cfg.single_slice ? cfg.cf_size : cfg.slice_size);
  tcb.key = key;
  tcb.meta.aer_min = cfg.aer_min;
  tcb.meta.aer_max = cfg.aer_max;
  tcb.meta.chal = chal0;
  tcb.aer_digest = measured_region_digest(cfg.aer_min, cfg.aer_max);
  report.log = &log;
}

void Device::queue_transfer(const Transfer& t) {
  held.push_back(t.src);
  held.push_back(t.dst);
}

Device::DrainOut Device::drain() {
  DrainOut out;
  while (!held.empty()) {
    if (log_full()) {
      out.blocked = true;
      break;
    }
    log.append_word(held.front(), slice.slice_top);
    held.pop_front();
    SliceMonitorInputs in;
    in.log_ptr_changed = true;
    if (slice_monitor_tick(slice, log.log_ptr(), in).t2) out.t2 = true;
  }
  return out;
}

void Device::violation_reset() {
  Challenge chal = tcb.meta.chal;
  log.clear();
  slice.reset(cfg.cf_size, cfg.single_slice ? cfg.cf_size : cfg.slice_size);
  cm_tx.reset();
  cm_rx.reset();
  latch.clear_all();
  tcb.last_prv_auth = MacTag{};
  tcb.meta.trigger_state = 0;
  tcb.meta.chal = chal;
  report.slice_top = 0;
  report.slice_bot = 0;
  report.prv_auth = MacTag{};
  held.clear();
  next_branch = 1;
}

}  // namespace cfaudit
