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

#ifndef WMSEG_SEGMENTATION_HPP_
#define WMSEG_SEGMENTATION_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace wmseg {

// Half-open index interval (lo, hi] over 1-based sequence positions.
struct Interval {
  int lo = 0;
  int hi = 0;

  int length() const { return hi - lo; }
  bool contains(int pos) const { return lo < pos && pos <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// A seeded interval with its best split and bootstrap p-value. tau_hat is
// the KS argmax, i.e. the last index of the left segment.
struct IntervalCandidate {
  Interval interval;
  int order = 0;  // generation order, breaks width ties
  int tau_hat = 0;
  double stat = 0.0;
  double p_tilde = 1.0;
  bool accepted = false;
};

struct SegmentationConfig {
  double decay_a = 0.70710678118654752;  // interval lengths shrink by sqrt(2)
  double threshold_zeta = 0.005;
  int boot_block = 20;
  int boot_reps = 399;
  int min_len = 50;
  std::uint64_t seed = 0;
};

void validate_segmentation_config(const SegmentationConfig& config);

enum class SegmentLabel { kWatermarked, kNonWatermarked };

std::string to_string(SegmentLabel label);

// Maximal same-label run of tokens [lo, hi] with the median p-value that
// decided the label.
struct Segment {
  int lo = 0;
  int hi = 0;
  SegmentLabel label = SegmentLabel::kNonWatermarked;
  double median_p = 1.0;
};

// change_points hold the first index of each new segment (the convention
// the ground truths use); candidates keep the raw KS argmax.
struct SegmentationResult {
  std::vector<int> change_points;
  std::vector<IntervalCandidate> candidates;
  std::vector<Segment> segments;
  std::vector<SegmentLabel> labels;  // one per token
};

// Fraction of entries <= t.
double ecdf(std::span<const double> values, double t);

// Weighted two-sample KS statistic for splitting `slice` after its first
// `tau` entries: (tau (L - tau) / L^{3/2}) sup_t |F_left - F_right|. The
// sup is exact (attained on the observed values).
double ks_stat(std::span<const double> slice, int tau);

// Cramer-von-Mises variant: (tau^2 (L-tau)^2 / L^3) integral of
// |F_left - F_right|^2 w(t) dt; exact for the default w == 1 (the
// integrand is piecewise constant), general w evaluated per piece.
double cvm_stat(std::span<const double> slice, int tau,
                const std::function<double(double)>& weight = {});

struct SplitResult {
  int tau = 0;      // offset within the slice, in [1, len-1]
  double stat = 0.0;
};

// Argmax of ks_stat over all interior split points; ties to the smallest.
SplitResult best_split(std::span<const double> slice);

// max_tau ks_stat(slice, tau); shares the admissible range with best_split.
double max_split_stat(std::span<const double> slice);

// Moving block bootstrap p-value for `observed` (= the max split statistic
// of the slice): overlapping blocks of length `block` are resampled with
// replacement, concatenated and truncated to the slice length.
double block_bootstrap_pvalue(std::span<const double> slice, double observed,
                              int block, int reps, std::uint64_t seed);

// Deterministic multi-scale interval layers; layer k has
// n_k = 2 ceil((1/a)^{k-1}) - 1 intervals of length m a^{k-1}, stopping
// once the length drops below min_len. Duplicates are removed, generation
// order is kept.
std::vector<Interval> seeded_intervals(int m, double a, int min_len);

// Best split + bootstrap p-value for every seeded interval.
std::vector<IntervalCandidate> evaluate_intervals(std::span<const double> pvals,
                                                  const SegmentationConfig& config,
                                                  int jobs = 1);

// Narrowest-over-threshold selection: repeatedly accept the narrowest
// candidate with p_tilde < zeta (ties to the earliest generated) and drop
// every candidate whose interval contains the accepted split. Returns
// indices into `candidates` in acceptance order.
std::vector<int> not_selection(std::span<const IntervalCandidate> candidates,
                               double zeta);

// Full pipeline over a p-value sequence: seeded intervals, per-interval
// split + bootstrap, NOT selection, then labeling.
SegmentationResult seedbs_not(std::span<const double> pvals,
                              const SegmentationConfig& config, int jobs = 1);

// Labels each segment watermarked iff its median p-value < 0.5.
// change_points are segment starts; adjacent same-label segments merge in
// the returned segment list.
std::vector<SegmentLabel> labels_from_changepoints(std::span<const double> pvals,
                                                   std::span<const int> change_points);
std::vector<Segment> segments_from_changepoints(std::span<const double> pvals,
                                                std::span<const int> change_points);

}  // namespace wmseg

#endif  // WMSEG_SEGMENTATION_HPP_
