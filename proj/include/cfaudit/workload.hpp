#pragma once

#include <cstdint>
#include <vector>

#include "cfaudit/core_log.hpp"
#include "cfaudit/verifier.hpp"

namespace cfaudit {

uint64_t splitmix64(uint64_t x);

struct WorkloadConfig {
  uint16_t aer_min = 0x0400;
  uint16_t aer_max = 0x0400 + 1024;  // exclusive; also the exit address
  uint64_t edge_seed = 1;            // fixes the program's branch targets
  uint64_t path_seed = 1;            // fixes the path taken through them
  uint64_t total_branches = 1000;
  double branch_rate = 100000.0;     // branches per second of app execution
};

// Synthetic instrumented application. The control-flow graph is derived from
// edge_seed: every node has four candidate successors given by a hash, so the
// verifier-side whitelist is reproducible without shipping the binary. The
// run is a random walk over those successors ending with a jump to aer_max.
class Workload {
 public:
  explicit Workload(const WorkloadConfig& cfg);

  const WorkloadConfig& config() const { return cfg_; }
  uint64_t total_branches() const { return cfg_.total_branches; }

  // App-clock completion time of the k-th branch, 1-based. Branch k lands
  // after k uniform inter-branch intervals; t(total_branches) is the app's
  // intrinsic runtime.
  int64_t branch_time_ns(uint64_t k) const;

  // k-th transfer, 1-based. The last one jumps to the exit address.
  const Transfer& transfer(uint64_t k) const;
  const std::vector<Transfer>& transfers() const { return seq_; }

  uint16_t neighbor(uint16_t src, unsigned j) const;
  PathPolicy policy() const;

 private:
  WorkloadConfig cfg_;
  uint32_t node_count_;
  std::vector<Transfer> seq_;
};

}  // namespace cfaudit
