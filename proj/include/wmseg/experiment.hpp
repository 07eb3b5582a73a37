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

#ifndef WMSEG_EXPERIMENT_HPP_
#define WMSEG_EXPERIMENT_HPP_

#include <cstdint>
#include <vector>

#include "wmseg/attacks.hpp"
#include "wmseg/rtest.hpp"
#include "wmseg/segmentation.hpp"

namespace wmseg {

struct ExperimentConfig {
  int setting = 1;
  MeasureKind measure;
  int vocab_size = 20;
  double beta = 5.0;
  std::uint64_t model_seed = 1;
  int prompt_len = 10;
  int window_B = 20;
  int replicates_T = 999;
  SegmentationConfig seg;
  std::uint64_t master_seed = 0;
  int n_seeds = 0;
  int jobs = 1;
};

struct SeedResult {
  std::uint64_t trial_seed = 0;
  std::vector<int> detected;
  double rand_index = 1.0;
  int n_detected = 0;
  int n_false_positive = 0;
  double runtime_ms = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SeedResult> rows;

  double median_rand_index() const;
  double quantile_rand_index(double q) const;
  double median_false_positives() const;
  double quantile_false_positives(double q) const;
};

// Full per-seed pipeline: build_setting -> window_pvalues -> seedbs_not ->
// rand_index. Trial seed for row i is master_seed + i; the same trial seed
// passed to the attack/pvalues/segment CLI stages reproduces the row.
// A detected change point counts as a false positive when no true change
// point lies within window_B of it.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace wmseg

#endif  // WMSEG_EXPERIMENT_HPP_
