#include <stdexcept>

#include "cfaudit/sizing.hpp"
#include "doctest.h"

using namespace cfaudit;

TEST_CASE("per-byte service time adds the mac and wire legs") {
  SizingParams p;
  CHECK(sizing_R(p) == doctest::Approx(1.0 / 8000 + 1.0 / 11520));
  p.mac_rate = 0;
  CHECK_THROWS_AS(sizing_R(p), std::invalid_argument);
  p.mac_rate = 8000;
  p.chan_rate = -1;
  CHECK_THROWS_AS(sizing_R(p), std::invalid_argument);
}

TEST_CASE("fixed message bytes per report cycle") {
  SizingParams p;
  // Two challenges, two tags, the metadata block and the verdict byte.
  CHECK(sizing_N(p) == 2 * 32 + 2 * 32 + 38 + 1);
  CHECK(sizing_N(p) == 167);
}

TEST_CASE("log fill rate is four bytes per branch") {
  SizingParams p;
  p.branch_rate = 50;
  CHECK(sizing_l(p) == 200.0);
  p.branch_rate = 0;
  CHECK_THROWS_AS(sizing_l(p), std::invalid_argument);
}

TEST_CASE("reference sizing point lands at a 16-byte log") {
  SizingParams p;  // M=8000, B=11520, 32/32/38, b=50
  SizingBound b = min_contention_free_log_size(p);
  CHECK_FALSE(b.unbounded);
  // 2*R*N*l/(1-R*l) with R=1/8000+1/11520, N=167, l=200.
  CHECK(b.raw_bound == doctest::Approx(14.7745).epsilon(1e-4));
  CHECK(b.cf_size == 16);
  CHECK(b.cf_size % 4 == 0);
  CHECK(static_cast<double>(b.cf_size) > b.raw_bound);
  CHECK(static_cast<double>(b.cf_size) - b.raw_bound <= 4.0);
}

TEST_CASE("a producer faster than the drain has no finite answer") {
  SizingParams p;
  p.branch_rate = 2000;  // l = 8000, R*l ~ 1.69
  SizingBound b = min_contention_free_log_size(p);
  CHECK(b.unbounded);

  // Just past the knee is unbounded; just short of it still has an answer,
  // if an enormous one.
  p.branch_rate = 1.0000001 / (4.0 * sizing_R(p));
  CHECK(min_contention_free_log_size(p).unbounded);
  p.branch_rate = 0.999 / (4.0 * sizing_R(p));
  SizingBound near = min_contention_free_log_size(p);
  CHECK_FALSE(near.unbounded);
  CHECK(near.raw_bound > 100000.0);
}

TEST_CASE("the bound vanishes with the branch rate") {
  SizingParams p;
  p.branch_rate = 1e-9;
  SizingBound b = min_contention_free_log_size(p);
  CHECK_FALSE(b.unbounded);
  CHECK(b.raw_bound < 1e-3);
  CHECK(b.cf_size == 4);  // smallest legal ring already suffices
}

TEST_CASE("the bound is monotone in every pressure direction") {
  SizingParams base;
  SizingBound b0 = min_contention_free_log_size(base);

  SizingParams faster_app = base;
  faster_app.branch_rate *= 2;
  CHECK(min_contention_free_log_size(faster_app).raw_bound > b0.raw_bound);

  SizingParams slower_mac = base;
  slower_mac.mac_rate /= 2;
  CHECK(min_contention_free_log_size(slower_mac).raw_bound > b0.raw_bound);

  SizingParams slower_wire = base;
  slower_wire.chan_rate /= 2;
  CHECK(min_contention_free_log_size(slower_wire).raw_bound > b0.raw_bound);

  SizingParams bigger_msgs = base;
  bigger_msgs.meta_size += 100;
  CHECK(min_contention_free_log_size(bigger_msgs).raw_bound > b0.raw_bound);
}
