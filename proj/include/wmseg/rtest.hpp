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

#ifndef WMSEG_RTEST_HPP_
#define WMSEG_RTEST_HPP_

#include <cstdint>
#include <span>

#include "wmseg/dependence.hpp"
#include "wmseg/types.hpp"
#include "wmseg/watermark.hpp"

namespace wmseg {

// Randomization test configuration. window_B must be even (the moving
// windows extend B/2 to each side); replicate key sequences for t = 1..T
// are drawn from substreams (seed, t), so results do not depend on the
// parallelism degree.
struct TestConfig {
  int window_B = 20;
  int replicates_T = 999;
  MeasureKind measure;
  std::uint64_t seed = 0;
};

void validate_test_config(const TestConfig& config);

// Windowed p-values p_1..p_m; every value lies on the grid k/(T+1).
struct PValueSequence {
  std::vector<double> pvals;
  int window_B = 0;
  int replicates_T = 0;
  MeasureKind measure;
};

// (1 + #{t : observed <= replicate_t}) / (T + 1).
double randomization_pvalue(double observed, std::span<const double> replicates);

// Max over all aligned length-B windows of keys x tokens of the measure.
double global_scan_stat(const KeySequence& keys, const TokenSequence& text,
                        int window_B, const MeasureKind& kind);

// Randomization p-value of the global scan statistic against
// config.replicates_T freshly drawn key sequences.
double global_test(const KeySequence& keys, const TokenSequence& text,
                   const TestConfig& config, int jobs = 1);

// For each position i, tests the clamped token window against the best
// matching key window (max over k), using one shared set of replicate key
// sequences across all windows.
PValueSequence window_pvalues(const KeySequence& keys, const TokenSequence& text,
                              const TestConfig& config, int jobs = 1);

}  // namespace wmseg

#endif  // WMSEG_RTEST_HPP_
