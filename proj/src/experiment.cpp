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

#include "wmseg/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "wmseg/parallel.hpp"

namespace wmseg {

namespace {

double quantile_of(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty report");
  std::sort(values.begin(), values.end());
  const double idx = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  const double frac = idx - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

int count_false_positives(std::span<const int> detected, std::span<const int> truth,
                          int tolerance) {
  int count = 0;
  for (const int d : detected) {
    bool matched = false;
    for (const int t : truth) {
      if (std::abs(d - t) <= tolerance) {
        matched = true;
        break;
      }
    }
    if (!matched) ++count;
  }
  return count;
}

}  // namespace

double ExperimentReport::median_rand_index() const { return quantile_rand_index(0.5); }

double ExperimentReport::quantile_rand_index(double q) const {
  std::vector<double> values;
  values.reserve(rows.size());
  for (const auto& row : rows) values.push_back(row.rand_index);
  return quantile_of(std::move(values), q);
}

double ExperimentReport::median_false_positives() const {
  return quantile_false_positives(0.5);
}

double ExperimentReport::quantile_false_positives(double q) const {
  std::vector<double> values;
  values.reserve(rows.size());
  for (const auto& row : rows) values.push_back(row.n_false_positive);
  return quantile_of(std::move(values), q);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.n_seeds < 0) throw std::invalid_argument("n_seeds must be >= 0");
  ExperimentReport report;
  report.config = config;
  if (config.n_seeds == 0) return report;

  const TokenModel model =
      new_markov_model(config.vocab_size, config.beta, config.model_seed);
  const Scheme scheme = scheme_for(config.measure.type);
  report.rows.resize(config.n_seeds);
  parallel_for(static_cast<std::size_t>(config.n_seeds), config.jobs, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t trial = config.master_seed + i;
    const SettingData data =
        build_setting(config.setting, model, scheme, trial, config.prompt_len);
    TestConfig test_config;
    test_config.window_B = config.window_B;
    test_config.replicates_T = config.replicates_T;
    test_config.measure = config.measure;
    test_config.seed = trial;
    const PValueSequence pvalues = window_pvalues(data.keys, data.text, test_config);
    SegmentationConfig seg_config = config.seg;
    seg_config.seed = trial;
    const SegmentationResult seg = seedbs_not(pvalues.pvals, seg_config);

    SeedResult& row = report.rows[i];
    row.trial_seed = trial;
    row.detected = seg.change_points;
    row.n_detected = static_cast<int>(seg.change_points.size());
    row.rand_index =
        rand_index(seg.change_points, data.truth.change_points, data.text.size());
    row.n_false_positive = count_false_positives(
        seg.change_points, data.truth.change_points, config.window_B);
    row.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  });
  return report;
}

}  // namespace wmseg
