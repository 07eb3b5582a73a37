// Copyright 2026 The wmseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wmseg/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "wmseg/rng.hpp"

namespace wmseg {
namespace {

// Grid-valued p-values as the randomization test would emit them.
std::vector<double> random_grid_pvals(Rng& rng, int count, int grid) {
  std::vector<double> out(count);
  for (auto& p : out) {
    p = static_cast<double>(1 + rng.below(static_cast<std::uint64_t>(grid))) / grid;
  }
  return out;
}

double dense_grid_ks(std::span<const double> slice, int tau) {
  const int len = static_cast<int>(slice.size());
  const auto left = slice.first(tau);
  const auto right = slice.subspan(tau);
  double max_diff = 0.0;
  for (int step = 0; step <= 10000; ++step) {
    const double t = step / 10000.0;
    max_diff = std::max(max_diff, std::fabs(ecdf(left, t) - ecdf(right, t)));
  }
  return tau * (len - tau) / std::pow(len, 1.5) * max_diff;
}

TEST_CASE("ecdf basics") {
  const std::vector<double> pair{0.2, 0.8};
  CHECK(ecdf(pair, 1.0) == 1.0);
  CHECK(ecdf(pair, 0.5) == 0.5);
  const std::vector<double> triple{0.1, 0.1, 0.9};
  CHECK(ecdf(triple, 0.1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(ecdf(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ecdf(pair, 1.5), std::invalid_argument);
}

TEST_CASE("ks_stat hand values") {
  const std::vector<double> constant{0.3, 0.3, 0.3, 0.3};
  CHECK(ks_stat(constant, 2) == 0.0);
  const std::vector<double> split{0.9, 0.8, 0.1, 0.2};
  CHECK(ks_stat(split, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(ks_stat(split, 0), std::invalid_argument);
  CHECK_THROWS_AS(ks_stat(split, 4), std::invalid_argument);
}

TEST_CASE("ks_stat prefactor bound") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int len = 2 + static_cast<int>(rng.below(40));
    const std::vector<double> pvals = random_grid_pvals(rng, len, 100);
    for (int tau = 1; tau < len; ++tau) {
      CHECK(ks_stat(pvals, tau) >= 0.0);
      CHECK(ks_stat(pvals, tau) <= std::sqrt(static_cast<double>(len)) / 4.0 + 1e-12);
    }
  }
}

TEST_CASE("ks_stat sorted scan equals a dense-grid evaluation") {
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const int len = 6 + static_cast<int>(rng.below(30));
    const std::vector<double> pvals = random_grid_pvals(rng, len, 100);
    const int tau = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(len - 1)));
    CHECK(std::fabs(ks_stat(pvals, tau) - dense_grid_ks(pvals, tau)) <= 1e-9);
  }
}

TEST_CASE("cvm_stat hand values") {
  const std::vector<double> constant{0.4, 0.4, 0.4, 0.4};
  CHECK(cvm_stat(constant, 2) == 0.0);
  // piecewise integration: 0.25 * (0.5^2*0.1 + 1*0.6 + 0.5^2*0.1) = 0.1625
  const std::vector<double> split{0.9, 0.8, 0.1, 0.2};
  CHECK(cvm_stat(split, 2) == doctest::Approx(0.1625).epsilon(1e-12));
  // linear in the weight
  const double base = cvm_stat(split, 2);
  CHECK(cvm_stat(split, 2, [](double) { return 2.5; }) ==
        doctest::Approx(2.5 * base).epsilon(1e-12));
}

TEST_CASE("best_split hand values and tie rule") {
  const std::vector<double> clear{0.9, 0.9, 0.05, 0.05};
  CHECK(best_split(clear).tau == 2);
  const std::vector<double> constant{0.5, 0.5, 0.5, 0.5, 0.5};
  const SplitResult flat = best_split(constant);
  CHECK(flat.tau == 1);
  CHECK(flat.stat == 0.0);
  CHECK_THROWS_AS(best_split(std::vector<double>{0.5}), std::invalid_argument);
}

TEST_CASE("best_split agrees with an exhaustive ks_stat scan") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int len = 2 + static_cast<int>(rng.below(40));
    const std::vector<double> pvals = random_grid_pvals(rng, len, 20);
    int best_tau = 1;
    double best_stat = -1.0;
    for (int tau = 1; tau < len; ++tau) {
      const double stat = ks_stat(pvals, tau);
      if (stat > best_stat + 1e-15) {
        best_stat = stat;
        best_tau = tau;
      }
    }
    const SplitResult got = best_split(pvals);
    CHECK(got.tau == best_tau);
    CHECK(got.stat == doctest::Approx(best_stat).epsilon(1e-12));
    CHECK(max_split_stat(pvals) == got.stat);
  }
}

TEST_CASE("block bootstrap on a constant slice") {
  const std::vector<double> constant(60, 0.25);
  // Every resample is constant, so S* = 0 and a positive observed value
  // beats all replicates.
  CHECK(block_bootstrap_pvalue(constant, 0.5, 10, 39, 4) ==
        doctest::Approx(1.0 / 40.0).epsilon(1e-15));
  // observed 0 ties every replicate
  CHECK(block_bootstrap_pvalue(constant, 0.0, 10, 39, 4) == 1.0);
}

TEST_CASE("block bootstrap determinism and validation") {
  Rng rng(13);
  const std::vector<double> pvals = random_grid_pvals(rng, 80, 50);
  const double observed = max_split_stat(pvals);
  const double a = block_bootstrap_pvalue(pvals, observed, 20, 99, 5);
  const double b = block_bootstrap_pvalue(pvals, observed, 20, 99, 5);
  CHECK(a == b);
  const double scaled = a * 100;
  CHECK(std::fabs(scaled - std::round(scaled)) < 1e-12);
  CHECK_THROWS_AS(block_bootstrap_pvalue(pvals, observed, 81, 99, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(block_bootstrap_pvalue(pvals, observed, 0, 99, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(block_bootstrap_pvalue(pvals, observed, 20, 0, 5),
                  std::invalid_argument);
}

TEST_CASE("seeded_intervals snapshot for m=100, a=1/sqrt(2), min_len=50") {
  const std::vector<Interval> expected{{0, 100}, {0, 71}, {14, 86}, {29, 100},
                                       {0, 50},  {25, 75}, {50, 100}};
  CHECK(seeded_intervals(100, 0.70710678118654752, 50) == expected);
}

TEST_CASE("seeded_intervals single-layer and validation cases") {
  const std::vector<Interval> single{{0, 100}};
  CHECK(seeded_intervals(100, 0.99, 100) == single);
  CHECK_THROWS_AS(seeded_intervals(100, 0.4, 50), std::invalid_argument);
  CHECK_THROWS_AS(seeded_intervals(100, 1.0, 50), std::invalid_argument);
  CHECK_THROWS_AS(seeded_intervals(100, 0.7, 1), std::invalid_argument);
}

TEST_CASE("seeded_intervals construction invariants") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 50 + static_cast<int>(rng.below(1000));
    const double a = 0.5 + 0.49 * rng.uniform();
    const int min_len = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - 1)));
    const std::vector<Interval> intervals = seeded_intervals(m, a, min_len);
    CHECK(!intervals.empty());
    CHECK(intervals.front() == Interval{0, m});
    for (const Interval& iv : intervals) {
      CHECK(iv.lo >= 0);
      CHECK(iv.lo < iv.hi);
      CHECK(iv.hi <= m);
      CHECK(iv.length() >= std::min(min_len, m));
    }
    // purity
    CHECK(seeded_intervals(m, a, min_len) == intervals);
    // no duplicates
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      for (std::size_t j = i + 1; j < intervals.size(); ++j) {
        CHECK(!(intervals[i] == intervals[j]));
      }
    }
  }
}

TEST_CASE("not_selection keeps the narrowest and removes covered candidates") {
  std::vector<IntervalCandidate> candidates(3);
  candidates[0] = {{0, 100}, 0, 50, 2.0, 0.001, false};
  candidates[1] = {{20, 80}, 1, 51, 2.0, 0.001, false};
  candidates[2] = {{0, 60}, 2, 49, 2.0, 0.5, false};
  const std::vector<int> accepted = not_selection(candidates, 0.01);
  // the narrower (20,80] wins; (0,100] contains tau 51 and is dropped
  REQUIRE(accepted.size() == 1);
  CHECK(accepted[0] == 1);
}

TEST_CASE("not_selection accepts disjoint candidates and breaks ties by order") {
  std::vector<IntervalCandidate> candidates(3);
  candidates[0] = {{0, 50}, 0, 25, 1.0, 0.001, false};
  candidates[1] = {{50, 100}, 1, 75, 1.5, 0.002, false};
  candidates[2] = {{10, 60}, 2, 26, 1.2, 0.001, false};
  const std::vector<int> accepted = not_selection(candidates, 0.01);
  REQUIRE(accepted.size() == 2);
  CHECK(accepted[0] == 0);  // same width as candidates[1..2], earliest order
  CHECK(accepted[1] == 1);
}

TEST_CASE("not_selection outcome is invariant to candidate order") {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<IntervalCandidate> candidates;
    const int count = 3 + static_cast<int>(rng.below(8));
    for (int i = 0; i < count; ++i) {
      const int lo = static_cast<int>(rng.below(80));
      const int hi = lo + 10 + static_cast<int>(rng.below(40));
      IntervalCandidate cand;
      cand.interval = {lo, hi};
      cand.order = i;
      cand.tau_hat = lo + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo - 1)));
      cand.p_tilde = rng.uniform() * 0.02;
      candidates.push_back(cand);
    }
    auto key = [&](int idx) {
      const IntervalCandidate& c = candidates[idx];
      return std::tuple(c.interval.lo, c.interval.hi, c.tau_hat);
    };
    std::vector<std::tuple<int, int, int>> baseline;
    for (const int idx : not_selection(candidates, 0.01)) baseline.push_back(key(idx));
    std::sort(baseline.begin(), baseline.end());

    std::vector<IntervalCandidate> shuffled = candidates;
    for (int i = count - 1; i > 0; --i) {
      std::swap(shuffled[i], shuffled[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    }
    std::vector<std::tuple<int, int, int>> permuted;
    for (const int idx : not_selection(shuffled, 0.01)) {
      const IntervalCandidate& c = shuffled[idx];
      permuted.push_back(std::tuple(c.interval.lo, c.interval.hi, c.tau_hat));
    }
    std::sort(permuted.begin(), permuted.end());
    CHECK(baseline == permuted);
  }
}

TEST_CASE("seedbs_not finds a single hard change once") {
  // strong change after position 50 of 100
  std::vector<double> pvals;
  Rng rng(29);
  for (int i = 0; i < 50; ++i) pvals.push_back(0.3 + 0.4 * rng.uniform());
  for (int i = 0; i < 50; ++i) pvals.push_back(0.001 + 0.002 * rng.uniform());
  SegmentationConfig config;
  config.min_len = 50;
  config.boot_block = 10;
  config.boot_reps = 199;
  config.threshold_zeta = 0.05;
  config.seed = 31;
  const SegmentationResult result = seedbs_not(pvals, config);
  REQUIRE(result.change_points.size() == 1);
  CHECK(std::abs(result.change_points[0] - 51) <= 5);
  REQUIRE(result.segments.size() == 2);
  CHECK(result.segments[0].label == SegmentLabel::kNonWatermarked);
  CHECK(result.segments[1].label == SegmentLabel::kWatermarked);
  CHECK(result.segments[0].hi + 1 == result.segments[1].lo);
  // candidates carry their diagnostics
  for (const auto& cand : result.candidates) {
    CHECK(cand.interval.contains(cand.tau_hat));
    CHECK(cand.p_tilde > 0.0);
    CHECK(cand.p_tilde <= 1.0);
  }
  // determinism incl. jobs
  const SegmentationResult again = seedbs_not(pvals, config, 3);
  CHECK(again.change_points == result.change_points);
}

TEST_CASE("seedbs_not accepts at most one of two overlapping candidates") {
  std::vector<double> pvals;
  Rng rng(37);
  for (int i = 0; i < 60; ++i) pvals.push_back(0.3 + 0.5 * rng.uniform());
  for (int i = 0; i < 60; ++i) pvals.push_back(0.002 * (1 + rng.uniform()));
  SegmentationConfig config;
  config.min_len = 60;
  config.boot_block = 12;
  config.boot_reps = 199;
  config.threshold_zeta = 0.05;
  config.seed = 41;
  const SegmentationResult result = seedbs_not(pvals, config);
  int accepted = 0;
  for (const auto& cand : result.candidates) accepted += cand.accepted ? 1 : 0;
  CHECK(accepted == static_cast<int>(result.change_points.size()));
  CHECK(result.change_points.size() <= 2);
  REQUIRE(!result.change_points.empty());
  CHECK(std::abs(result.change_points[0] - 61) <= 6);
  // sorted distinct
  for (std::size_t i = 1; i < result.change_points.size(); ++i) {
    CHECK(result.change_points[i - 1] < result.change_points[i]);
  }
}

TEST_CASE("labels_from_changepoints applies the median rule") {
  std::vector<double> pvals(500);
  for (int i = 0; i < 250; ++i) pvals[i] = 0.02;
  for (int i = 250; i < 500; ++i) pvals[i] = 0.48;
  SUBCASE("no change points: all watermarked") {
    const std::vector<int> none;
    const auto labels = labels_from_changepoints(pvals, none);
    for (const auto label : labels) CHECK(label == SegmentLabel::kWatermarked);
  }
  SUBCASE("split at 251: medians 0.02 and 0.48 both below 0.5?") {
    // second half median 0.48 < 0.5 would still read watermarked; raise it
    for (int i = 250; i < 500; ++i) pvals[i] = 0.48 + 0.2 * ((i % 5) / 4.0);
    const std::vector<int> cps{251};
    const auto labels = labels_from_changepoints(pvals, cps);
    CHECK(labels[0] == SegmentLabel::kWatermarked);
    CHECK(labels[249] == SegmentLabel::kWatermarked);
    CHECK(labels[250] == SegmentLabel::kNonWatermarked);
    CHECK(labels[499] == SegmentLabel::kNonWatermarked);
    const auto segments = segments_from_changepoints(pvals, cps);
    REQUIRE(segments.size() == 2);
    CHECK(segments[0].lo == 1);
    CHECK(segments[0].hi == 250);
    CHECK(segments[0].median_p == doctest::Approx(0.02));
    CHECK(segments[1].lo == 251);
    CHECK(segments[1].hi == 500);
  }
}

TEST_CASE("adjacent same-label segments merge in the report") {
  std::vector<double> pvals(100, 0.01);
  for (int i = 40; i < 60; ++i) pvals[i] = 0.012;  // still watermarked
  const std::vector<int> cps{41, 61};
  const auto labels = labels_from_changepoints(pvals, cps);
  for (const auto label : labels) CHECK(label == SegmentLabel::kWatermarked);
  const auto segments = segments_from_changepoints(pvals, cps);
  REQUIRE(segments.size() == 1);
  CHECK(segments[0].lo == 1);
  CHECK(segments[0].hi == 100);
}

TEST_CASE("alternating four-segment labeling") {
  std::vector<double> pvals;
  for (int seg = 0; seg < 5; ++seg) {
    const double level = seg % 2 == 0 ? 0.01 : 0.7;
    for (int i = 0; i < 100; ++i) pvals.push_back(level);
  }
  const std::vector<int> cps{101, 201, 301, 401};
  const auto segments = segments_from_changepoints(pvals, cps);
  REQUIRE(segments.size() == 5);
  for (int seg = 0; seg < 5; ++seg) {
    CHECK(segments[seg].label == (seg % 2 == 0 ? SegmentLabel::kWatermarked
                                               : SegmentLabel::kNonWatermarked));
  }
}

}  // namespace
}  // namespace wmseg
