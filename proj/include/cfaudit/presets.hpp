#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cfaudit/sim.hpp"

namespace cfaudit {

// Reference operating points for the four bundled application profiles.
// Overheads are percent runtime increase vs the best-effort baseline; gains
// are percent utilization increase of each two-slice configuration over the
// single-buffer run.
struct AppPreset {
  std::string name;
  WorkloadConfig workload;
  double target_acfa_overhead = 0.0;
  double ref_c2_overhead = 0.0;
  double ref_c4_overhead = 0.0;
  double ref_c2_gain = 0.0;
  double ref_c4_gain = 0.0;
};

// Everything held constant while a preset's branch rate is searched.
struct CalibrationFixed {
  LinkConfig link;
  TcbConfig tcb;
  uint32_t acfa_cf_size = 2048;
  int64_t dispatch_ns = 200'000;
  double horizon_ns = 600e9;
  uint64_t seed = 1;
};

struct CalibrationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The registry the CLI and tests run against. calibrate_preset mutates the
// stored workload in place, so later lookups see the calibrated values.
std::vector<AppPreset>& app_presets();
AppPreset* find_preset(std::string_view name);

// Fixture the bundled presets were tuned under (shared by all four).
CalibrationFixed preset_calibration_fixed();

// Adjusts branch_rate until a single-buffer run of `app` lands within
// tol_pp of target_pct overhead, stores and returns the workload.
WorkloadConfig calibrate_preset(std::string_view app, double target_pct,
                                const CalibrationFixed& fixed,
                                double tol_pp = 0.5);

// Assembles a runnable config for one preset under the shared fixture.
SimConfig preset_sim_config(const AppPreset& preset, Mode mode,
                            uint32_t cf_size, const CalibrationFixed& fixed);

}  // namespace cfaudit
