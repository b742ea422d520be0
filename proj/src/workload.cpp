#include "cfaudit/workload.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace cfaudit {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Workload::Workload(const WorkloadConfig& cfg) : cfg_(cfg) {
  if (cfg_.aer_max <= cfg_.aer_min) {
    throw std::invalid_argument("executable region is empty");
  }
  if ((cfg_.aer_min | cfg_.aer_max) & 1) {
    throw std::invalid_argument("executable region must be 2-byte aligned");
  }
  if (cfg_.branch_rate <= 0.0) {
    throw std::invalid_argument("branch_rate must be positive");
  }
  if (cfg_.total_branches == 0) {
    throw std::invalid_argument("a run needs at least the exit branch");
  }
  node_count_ = (static_cast<uint32_t>(cfg_.aer_max) - cfg_.aer_min) / 2;

  seq_.reserve(cfg_.total_branches);
  std::mt19937_64 rng(cfg_.path_seed);
  uint16_t cur = cfg_.aer_min;
  for (uint64_t k = 1; k + 1 <= cfg_.total_branches; ++k) {
    uint16_t next = neighbor(cur, static_cast<unsigned>(rng() & 3));
    seq_.push_back({cur, next});
    cur = next;
  }
  seq_.push_back({cur, cfg_.aer_max});
}

int64_t Workload::branch_time_ns(uint64_t k) const {
  long double t = static_cast<long double>(k) * 1e9L /
                  static_cast<long double>(cfg_.branch_rate);
  return llroundl(t);
}

const Transfer& Workload::transfer(uint64_t k) const {
  if (k == 0 || k > seq_.size()) throw std::out_of_range("branch index");
  return seq_[k - 1];
}

uint16_t Workload::neighbor(uint16_t src, unsigned j) const {
  uint64_t h = splitmix64(cfg_.edge_seed ^
                          (static_cast<uint64_t>(src) * 2654435761ULL + j));
  return static_cast<uint16_t>(cfg_.aer_min + 2 * (h % node_count_));
}

PathPolicy Workload::policy() const {
  PathPolicy p;
  p.entry = cfg_.aer_min;
  p.exit = cfg_.aer_max;
  p.allowed_edges.reserve(static_cast<size_t>(node_count_) * 5);
  for (uint32_t i = 0; i < node_count_; ++i) {
    uint16_t src = static_cast<uint16_t>(cfg_.aer_min + 2 * i);
    for (unsigned j = 0; j < 4; ++j) p.add_edge(src, neighbor(src, j));
    p.add_edge(src, cfg_.aer_max);  // any block may return to the exit stub
  }
  return p;
}

}  // namespace cfaudit
