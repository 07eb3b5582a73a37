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

#include "wmseg/rtest.hpp"

#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "wmseg/rng.hpp"

namespace wmseg {
namespace {

// Straight-from-the-definition reference: every (a, b) window pair through
// measure_slice, no score tables or rolling sums.
double brute_global_scan(const KeySequence& keys, const TokenSequence& text, int B,
                         const MeasureKind& kind) {
  double best = -1e300;
  for (int a = 0; a + B <= keys.size(); ++a) {
    for (int b = 0; b + B <= text.size(); ++b) {
      const auto window = std::span<const TokenId>(text.tokens).subspan(b, B);
      best = std::max(best, measure_slice(kind, keys, a, B, window));
    }
  }
  return best;
}

// Reference phi for window i (1-based): max over k of the measure between
// the clamped windows, aligned over the first min-length positions for the
// additive measures and taken whole for the Levenshtein ones.
double brute_window_phi(const KeySequence& keys, const TokenSequence& text,
                        const MeasureKind& kind, int B, int i) {
  const int n = keys.size();
  const int m = text.size();
  const int half = B / 2;
  const int ilo = std::max(1, i - half);
  const int ihi = std::min(m, i + half);
  double best = -1e300;
  for (int k = 1; k <= n; ++k) {
    const int klo = std::max(1, k - half);
    const int khi = std::min(n, k + half);
    double value;
    if (is_levenshtein(kind.type)) {
      const auto window =
          std::span<const TokenId>(text.tokens).subspan(ilo - 1, ihi - ilo + 1);
      value = measure_slice(kind, keys, klo - 1, khi - klo + 1, window);
    } else {
      const int len = std::min(khi - klo, ihi - ilo) + 1;
      const auto window = std::span<const TokenId>(text.tokens).subspan(ilo - 1, len);
      value = measure_slice(kind, keys, klo - 1, len, window);
    }
    best = std::max(best, value);
  }
  return best;
}

PValueSequence brute_window_pvalues(const KeySequence& keys, const TokenSequence& text,
                                    const TestConfig& config) {
  const int m = text.size();
  PValueSequence out;
  out.window_B = config.window_B;
  out.replicates_T = config.replicates_T;
  out.measure = config.measure;
  std::vector<double> observed(m);
  for (int i = 1; i <= m; ++i) {
    observed[i - 1] = brute_window_phi(keys, text, config.measure, config.window_B, i);
  }
  std::vector<int> counts(m, 0);
  for (int t = 1; t <= config.replicates_T; ++t) {
    const std::uint64_t seed = mix64(mix64(config.seed, stream_tag::kReplicateKeys),
                                     static_cast<std::uint64_t>(t));
    const KeySequence rep = gen_keys(keys.scheme, keys.size(), keys.vocab_size, seed);
    for (int i = 1; i <= m; ++i) {
      if (observed[i - 1] <=
          brute_window_phi(rep, text, config.measure, config.window_B, i)) {
        ++counts[i - 1];
      }
    }
  }
  out.pvals.resize(m);
  for (int i = 0; i < m; ++i) {
    out.pvals[i] = static_cast<double>(1 + counts[i]) / (config.replicates_T + 1);
  }
  return out;
}

TEST_CASE("randomization_pvalue follows the rank formula") {
  std::vector<double> reps(9, 0.5);
  CHECK(randomization_pvalue(1.0, reps) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(randomization_pvalue(0.5, reps) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(randomization_pvalue(0.2, reps) == doctest::Approx(1.0).epsilon(1e-15));
  reps = {0.1, 0.2, 0.3, 0.4};
  CHECK(randomization_pvalue(0.25, reps) == doctest::Approx(3.0 / 5.0).epsilon(1e-15));
  CHECK_THROWS_AS(randomization_pvalue(0.5, std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("global_scan_stat degenerates to the plain measure when n = m = B") {
  const TokenModel model = new_markov_model(5, 1.0, 3);
  for (const MeasureType type :
       {MeasureType::kIts, MeasureType::kEms, MeasureType::kItsl, MeasureType::kEmsl}) {
    const MeasureKind kind{type, 0.4};
    const KeySequence keys = gen_keys(scheme_for(type), 8, 5, 21);
    const TokenSequence text = generate_watermarked(model, {}, keys);
    CHECK(global_scan_stat(keys, text, 8, kind) ==
          doctest::Approx(measure(kind, keys, text.tokens)).epsilon(1e-12));
  }
}

TEST_CASE("global_scan_stat equals the brute-force enumeration") {
  const TokenModel model = new_markov_model(4, 1.0, 9);
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const MeasureType type = trial % 2 == 0 ? MeasureType::kEms : MeasureType::kIts;
    const MeasureKind kind{type, 0.4};
    const int n = 4 + static_cast<int>(rng.below(6));
    const int m = 4 + static_cast<int>(rng.below(6));
    const int B = 1 + static_cast<int>(rng.below(4));
    const KeySequence keys = gen_keys(scheme_for(type), n, 4, rng.next_u64());
    const TokenSequence text = sample_plain(model, {}, m, rng.next_u64());
    CHECK(global_scan_stat(keys, text, B, kind) ==
          doctest::Approx(brute_global_scan(keys, text, B, kind)).epsilon(1e-12));
  }
}

TEST_CASE("hand-enumerated 3-position EMS scan") {
  KeySequence keys;
  keys.scheme = Scheme::kEms;
  keys.vocab_size = 2;
  keys.ems.resize(3);
  keys.ems[0].xi = {std::exp(-1.0), 0.5};
  keys.ems[1].xi = {std::exp(-0.5), 0.5};
  keys.ems[2].xi = {std::exp(-2.0), 0.5};
  TokenSequence text;
  text.tokens = {1, 1, 1};
  // per-position scores: 0, 0.5, -1; windows of 2: (0.25, -0.25) over
  // key offsets x token offsets, max = mean(0, 0.5) = 0.25
  CHECK(global_scan_stat(keys, text, 2, {MeasureType::kEms, 0.4}) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("appending a key/token pair never decreases the scan statistic") {
  const TokenModel model = new_markov_model(3, 1.0, 2);
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(5));
    KeySequence keys = gen_keys(Scheme::kEms, n + 1, 3, rng.next_u64());
    KeySequence shorter = keys;
    shorter.ems.pop_back();
    TokenSequence text = sample_plain(model, {}, n + 1, rng.next_u64());
    TokenSequence shorter_text = text;
    shorter_text.tokens.pop_back();
    const MeasureKind kind{MeasureType::kEms, 0.4};
    CHECK(global_scan_stat(keys, text, 3, kind) >=
          global_scan_stat(shorter, shorter_text, 3, kind) - 1e-12);
  }
}

TEST_CASE("global_scan_stat validates the window") {
  const KeySequence keys = gen_keys(Scheme::kEms, 5, 3, 1);
  TokenSequence text;
  text.tokens = {1, 2, 3};
  CHECK_THROWS_AS(global_scan_stat(keys, text, 4, {MeasureType::kEms, 0.4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(global_scan_stat(keys, text, 0, {MeasureType::kEms, 0.4}),
                  std::invalid_argument);
}

TEST_CASE("global_test with a single replicate yields p in {1/2, 1}") {
  const TokenModel model = new_markov_model(6, 1.0, 4);
  const KeySequence keys = gen_keys(Scheme::kEms, 24, 6, 8);
  const TokenSequence text = sample_plain(model, {}, 24, 15);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const double p = global_test(keys, text, {4, 1, {MeasureType::kEms, 0.4}, seed});
    CHECK((p == 0.5 || p == 1.0));
  }
}

TEST_CASE("test config validation") {
  CHECK_THROWS_AS(validate_test_config({3, 10, {MeasureType::kEms, 0.4}, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_test_config({0, 10, {MeasureType::kEms, 0.4}, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_test_config({4, 0, {MeasureType::kEms, 0.4}, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_test_config({4, 10, {MeasureType::kEmsl, -1.0}, 0}),
                  std::invalid_argument);
}

TEST_CASE("window_pvalues matches the brute-force reference") {
  const TokenModel model = new_markov_model(4, 2.0, 6);
  for (const MeasureType type :
       {MeasureType::kEms, MeasureType::kIts, MeasureType::kItsl, MeasureType::kEmsl}) {
    const KeySequence keys = gen_keys(scheme_for(type), 12, 4, 31);
    const TokenSequence text = generate_watermarked(model, {}, keys);
    const TestConfig config{4, 5, {type, 0.4}, 97};
    const PValueSequence fast = window_pvalues(keys, text, config);
    const PValueSequence slow = brute_window_pvalues(keys, text, config);
    REQUIRE(fast.pvals.size() == slow.pvals.size());
    for (std::size_t i = 0; i < fast.pvals.size(); ++i) {
      CHECK(fast.pvals[i] == doctest::Approx(slow.pvals[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("window_pvalues with unequal key and text lengths") {
  const TokenModel model = new_markov_model(4, 2.0, 6);
  const KeySequence keys = gen_keys(Scheme::kEms, 9, 4, 3);
  TokenSequence text = sample_plain(model, {}, 14, 8);
  const TestConfig config{4, 7, {MeasureType::kEms, 0.4}, 55};
  const PValueSequence fast = window_pvalues(keys, text, config);
  const PValueSequence slow = brute_window_pvalues(keys, text, config);
  CHECK(fast.pvals == slow.pvals);
}

TEST_CASE("window_pvalues is deterministic and independent of jobs") {
  const TokenModel model = new_markov_model(5, 3.0, 1);
  const KeySequence keys = gen_keys(Scheme::kIts, 40, 5, 11);
  const TokenSequence text = generate_watermarked(model, {}, keys);
  const TestConfig config{6, 19, {MeasureType::kIts, 0.4}, 123};
  const PValueSequence serial = window_pvalues(keys, text, config, 1);
  const PValueSequence threaded = window_pvalues(keys, text, config, 3);
  CHECK(serial.pvals == threaded.pvals);
  const PValueSequence again = window_pvalues(keys, text, config, 1);
  CHECK(serial.pvals == again.pvals);
}

TEST_CASE("window p-values live on the randomization grid") {
  const TokenModel model = new_markov_model(3, 1.0, 19);
  const KeySequence keys = gen_keys(Scheme::kEms, 20, 3, 2);
  const TokenSequence text = sample_plain(model, {}, 20, 5);
  const int T = 9;
  const PValueSequence seq = window_pvalues(keys, text, {4, T, {MeasureType::kEms, 0.4}, 7});
  for (const double p : seq.pvals) {
    const double scaled = p * (T + 1);
    CHECK(std::fabs(scaled - std::round(scaled)) < 1e-12);
    CHECK(p >= 1.0 / (T + 1) - 1e-15);
    CHECK(p <= 1.0 + 1e-15);
  }
}

}  // namespace
}  // namespace wmseg
