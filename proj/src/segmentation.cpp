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
#include <stdexcept>

#include "wmseg/parallel.hpp"
#include "wmseg/rng.hpp"

namespace wmseg {

namespace {

constexpr double kGridTol = 1e-9;

int floor_tol(double x) { return static_cast<int>(std::floor(x + kGridTol)); }
int ceil_tol(double x) { return static_cast<int>(std::ceil(x - kGridTol)); }

double median_of(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n == 0) throw std::invalid_argument("median of empty slice");
  return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

// Scans every interior split of a sequence for the weighted two-sample KS
// maximum. Values are rank-compressed once; bootstrap resamples reuse the
// compression through index lists, so each split sweep is O(#unique).
class SplitScanner {
 public:
  explicit SplitScanner(std::span<const double> values)
      : len_(static_cast<int>(values.size())) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    unique_ = static_cast<int>(sorted.size());
    rank_.resize(len_);
    for (int i = 0; i < len_; ++i) {
      rank_[i] = static_cast<int>(
          std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
    }
  }

  // Identity order = the original sequence.
  SplitResult scan() const {
    identity_.resize(len_);
    for (int i = 0; i < len_; ++i) identity_[i] = i;
    return scan(identity_);
  }

  // `order` lists original positions; the scanned sequence is
  // values[order[0]], values[order[1]], ...
  SplitResult scan(std::span<const int> order) const {
    const int len = static_cast<int>(order.size());
    if (len < 2) throw std::invalid_argument("split scan needs length >= 2");
    std::vector<int> total(unique_, 0);
    for (const int pos : order) ++total[rank_[pos]];
    for (int r = 1; r < unique_; ++r) total[r] += total[r - 1];

    std::vector<int> left(unique_, 0);
    const double norm = std::pow(static_cast<double>(len), 1.5);
    SplitResult best{1, -1.0};
    for (int tau = 1; tau < len; ++tau) {
      ++left[rank_[order[tau - 1]]];
      double max_diff = 0.0;
      int cum_left = 0;
      const double inv_left = 1.0 / tau;
      const double inv_right = 1.0 / (len - tau);
      for (int r = 0; r < unique_; ++r) {
        cum_left += left[r];
        const double diff = std::fabs(cum_left * inv_left - (total[r] - cum_left) * inv_right);
        if (diff > max_diff) max_diff = diff;
      }
      const double stat =
          static_cast<double>(tau) * static_cast<double>(len - tau) / norm * max_diff;
      if (stat > best.stat) best = {tau, stat};
    }
    return best;
  }

 private:
  int len_;
  int unique_;
  std::vector<int> rank_;
  mutable std::vector<int> identity_;
};

void validate_split_args(std::span<const double> slice, int tau) {
  if (slice.size() < 2) throw std::invalid_argument("slice must have length >= 2");
  if (tau < 1 || tau >= static_cast<int>(slice.size())) {
    throw std::invalid_argument("tau must split the slice into nonempty halves");
  }
}

// ECDF difference |F_left - F_right| evaluated at each pooled value; the
// difference is constant between pooled values so these are the only
// candidates for the sup (and the pieces of the CvM integral).
struct PooledDiff {
  std::vector<double> values;  // ascending unique pooled values
  std::vector<double> diffs;   // |F_left - F_right| at each value
};

PooledDiff pooled_diffs(std::span<const double> slice, int tau) {
  std::vector<double> left(slice.begin(), slice.begin() + tau);
  std::vector<double> right(slice.begin() + tau, slice.end());
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  PooledDiff out;
  std::size_t i = 0, j = 0;
  while (i < left.size() || j < right.size()) {
    double v;
    if (j >= right.size() || (i < left.size() && left[i] <= right[j])) {
      v = left[i];
    } else {
      v = right[j];
    }
    while (i < left.size() && left[i] == v) ++i;
    while (j < right.size() && right[j] == v) ++j;
    out.values.push_back(v);
    out.diffs.push_back(std::fabs(static_cast<double>(i) / left.size() -
                                  static_cast<double>(j) / right.size()));
  }
  return out;
}

}  // namespace

void validate_segmentation_config(const SegmentationConfig& config) {
  if (!(config.decay_a >= 0.5) || !(config.decay_a < 1.0)) {
    throw std::invalid_argument("decay_a must lie in [1/2, 1)");
  }
  if (!(config.threshold_zeta > 0.0) || !(config.threshold_zeta < 1.0)) {
    throw std::invalid_argument("threshold_zeta must lie in (0, 1)");
  }
  if (config.boot_block < 1) throw std::invalid_argument("boot_block must be >= 1");
  if (config.boot_reps < 1) throw std::invalid_argument("boot_reps must be >= 1");
  if (config.min_len < 2) throw std::invalid_argument("min_len must be >= 2");
}

std::string to_string(SegmentLabel label) {
  return label == SegmentLabel::kWatermarked ? "watermarked" : "non-watermarked";
}

double ecdf(std::span<const double> values, double t) {
  if (values.empty()) throw std::invalid_argument("ecdf of empty slice");
  if (!(t >= 0.0) || !(t <= 1.0)) throw std::invalid_argument("t must lie in [0, 1]");
  std::size_t count = 0;
  for (const double v : values) {
    if (v <= t) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(values.size());
}

double ks_stat(std::span<const double> slice, int tau) {
  validate_split_args(slice, tau);
  const PooledDiff pooled = pooled_diffs(slice, tau);
  double max_diff = 0.0;
  for (const double d : pooled.diffs) max_diff = std::max(max_diff, d);
  const double len = static_cast<double>(slice.size());
  return static_cast<double>(tau) * (len - tau) / std::pow(len, 1.5) * max_diff;
}

double cvm_stat(std::span<const double> slice, int tau,
                const std::function<double(double)>& weight) {
  validate_split_args(slice, tau);
  const PooledDiff pooled = pooled_diffs(slice, tau);
  double integral = 0.0;
  for (std::size_t r = 0; r + 1 < pooled.values.size(); ++r) {
    const double width = pooled.values[r + 1] - pooled.values[r];
    if (width <= 0.0) continue;
    const double w =
        weight ? weight(0.5 * (pooled.values[r] + pooled.values[r + 1])) : 1.0;
    integral += pooled.diffs[r] * pooled.diffs[r] * w * width;
  }
  const double len = static_cast<double>(slice.size());
  const double left = static_cast<double>(tau);
  const double right = len - left;
  return left * left * right * right / (len * len * len) * integral;
}

SplitResult best_split(std::span<const double> slice) {
  if (slice.size() < 2) throw std::invalid_argument("slice must have length >= 2");
  return SplitScanner(slice).scan();
}

double max_split_stat(std::span<const double> slice) { return best_split(slice).stat; }

double block_bootstrap_pvalue(std::span<const double> slice, double observed,
                              int block, int reps, std::uint64_t seed) {
  const int len = static_cast<int>(slice.size());
  if (block < 1 || block > len) {
    throw std::invalid_argument("block length must satisfy 1 <= block <= slice length");
  }
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (len < 2) throw std::invalid_argument("slice must have length >= 2");

  const SplitScanner scanner(slice);
  const int n_blocks = len - block + 1;
  const int n_draws = (len + block - 1) / block;
  Rng rng(mix64(seed, stream_tag::kBootstrap));
  std::vector<int> order(len);
  int exceed = 0;
  for (int t = 0; t < reps; ++t) {
    int filled = 0;
    for (int d = 0; d < n_draws && filled < len; ++d) {
      const int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_blocks)));
      for (int b = 0; b < block && filled < len; ++b) order[filled++] = start + b;
    }
    if (observed <= scanner.scan(order).stat) ++exceed;
  }
  return static_cast<double>(1 + exceed) / static_cast<double>(reps + 1);
}

std::vector<Interval> seeded_intervals(int m, double a, int min_len) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (!(a >= 0.5) || !(a < 1.0)) throw std::invalid_argument("a must lie in [1/2, 1)");
  if (min_len < 2) throw std::invalid_argument("min_len must be >= 2");

  std::vector<Interval> intervals{{0, m}};
  for (int layer = 2; layer <= 64; ++layer) {
    const double length = m * std::pow(a, layer - 1);
    if (length < static_cast<double>(min_len) - kGridTol) break;
    const int count = 2 * ceil_tol(std::pow(1.0 / a, layer - 1)) - 1;
    const double shift = (m - length) / (count - 1);
    for (int i = 1; i <= count; ++i) {
      const double start = (i - 1) * shift;
      Interval iv{std::max(0, floor_tol(start)), std::min(m, ceil_tol(start + length))};
      if (std::find(intervals.begin(), intervals.end(), iv) == intervals.end()) {
        intervals.push_back(iv);
      }
    }
  }
  return intervals;
}

std::vector<IntervalCandidate> evaluate_intervals(std::span<const double> pvals,
                                                  const SegmentationConfig& config,
                                                  int jobs) {
  validate_segmentation_config(config);
  const int m = static_cast<int>(pvals.size());
  if (m < config.min_len) {
    throw std::invalid_argument("sequence shorter than min_len");
  }
  const std::vector<Interval> intervals =
      seeded_intervals(m, config.decay_a, config.min_len);
  std::vector<IntervalCandidate> candidates(intervals.size());
  parallel_for(intervals.size(), jobs, [&](std::size_t idx) {
    const Interval iv = intervals[idx];
    const auto slice = pvals.subspan(iv.lo, iv.length());
    const SplitResult split = best_split(slice);
    IntervalCandidate& cand = candidates[idx];
    cand.interval = iv;
    cand.order = static_cast<int>(idx);
    cand.tau_hat = iv.lo + split.tau;
    cand.stat = split.stat;
    cand.p_tilde = block_bootstrap_pvalue(slice, split.stat, config.boot_block,
                                          config.boot_reps,
                                          mix64(config.seed, idx));
  });
  return candidates;
}

std::vector<int> not_selection(std::span<const IntervalCandidate> candidates,
                               double zeta) {
  std::vector<int> open;
  for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
    if (candidates[i].p_tilde < zeta) open.push_back(i);
  }
  std::vector<int> accepted;
  while (!open.empty()) {
    int pick = open.front();
    for (const int i : open) {
      const int width = candidates[i].interval.length();
      const int best_width = candidates[pick].interval.length();
      if (width < best_width ||
          (width == best_width && candidates[i].order < candidates[pick].order)) {
        pick = i;
      }
    }
    accepted.push_back(pick);
    const int tau = candidates[pick].tau_hat;
    std::erase_if(open, [&](int i) { return candidates[i].interval.contains(tau); });
  }
  return accepted;
}

std::vector<SegmentLabel> labels_from_changepoints(std::span<const double> pvals,
                                                   std::span<const int> change_points) {
  const int m = static_cast<int>(pvals.size());
  std::vector<SegmentLabel> labels(m);
  int start = 1;
  std::size_t next = 0;
  while (start <= m) {
    const int end =
        next < change_points.size() ? change_points[next] - 1 : m;
    if (end < start || end > m) {
      throw std::invalid_argument("change points must be sorted and interior");
    }
    const double med = median_of(pvals.subspan(start - 1, end - start + 1));
    const SegmentLabel label =
        med < 0.5 ? SegmentLabel::kWatermarked : SegmentLabel::kNonWatermarked;
    for (int i = start; i <= end; ++i) labels[i - 1] = label;
    start = end + 1;
    ++next;
  }
  return labels;
}

std::vector<Segment> segments_from_changepoints(std::span<const double> pvals,
                                                std::span<const int> change_points) {
  const std::vector<SegmentLabel> labels = labels_from_changepoints(pvals, change_points);
  const int m = static_cast<int>(pvals.size());
  std::vector<Segment> segments;
  int start = 1;
  for (int i = 2; i <= m + 1; ++i) {
    if (i == m + 1 || labels[i - 1] != labels[start - 1]) {
      Segment seg;
      seg.lo = start;
      seg.hi = i - 1;
      seg.label = labels[start - 1];
      seg.median_p = median_of(pvals.subspan(start - 1, i - start));
      segments.push_back(seg);
      start = i;
    }
  }
  return segments;
}

SegmentationResult seedbs_not(std::span<const double> pvals,
                              const SegmentationConfig& config, int jobs) {
  SegmentationResult result;
  result.candidates = evaluate_intervals(pvals, config, jobs);
  const std::vector<int> accepted =
      not_selection(result.candidates, config.threshold_zeta);
  for (const int idx : accepted) {
    result.candidates[idx].accepted = true;
    // Reported change points use the segment-start convention.
    result.change_points.push_back(result.candidates[idx].tau_hat + 1);
  }
  std::sort(result.change_points.begin(), result.change_points.end());
  result.labels = labels_from_changepoints(pvals, result.change_points);
  result.segments = segments_from_changepoints(pvals, result.change_points);
  return result;
}

}  // namespace wmseg
