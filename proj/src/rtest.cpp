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
#include <limits>
#include <stdexcept>
#include <vector>

#include "wmseg/parallel.hpp"
#include "wmseg/rng.hpp"

namespace wmseg {

namespace {

constexpr double kXiClampLo = 1e-15;
constexpr double kXiClampHi = 1.0 - 1e-15;

// Per-key score of each vocabulary entry, so the additive measures become
// h(key_k, token_j) = table[k * V + (token_j - 1)]. Window means then
// reduce to rolling sums along diagonals.
std::vector<double> score_table(const KeySequence& keys, MeasureType type) {
  const int n = keys.size();
  const int vocab = keys.vocab_size;
  std::vector<double> table(static_cast<std::size_t>(n) * vocab);
  if (type == MeasureType::kIts) {
    const double denom = static_cast<double>(vocab - 1);
    for (int k = 0; k < n; ++k) {
      const ItsKey& key = keys.its[k];
      double* row = table.data() + static_cast<std::size_t>(k) * vocab;
      for (int v = 0; v < vocab; ++v) {
        row[v] = (key.u - 0.5) * ((static_cast<double>(key.pi[v]) - 1.0) / denom - 0.5);
      }
    }
  } else {
    for (int k = 0; k < n; ++k) {
      const EmsKey& key = keys.ems[k];
      double* row = table.data() + static_cast<std::size_t>(k) * vocab;
      for (int v = 0; v < vocab; ++v) {
        row[v] = std::log(std::clamp(key.xi[v], kXiClampLo, kXiClampHi)) + 1.0;
      }
    }
  }
  return table;
}

// prefix[k][j] accumulates the score along the diagonal through (k, j),
// starting where the diagonal meets a table edge.
void diagonal_prefix(const std::vector<double>& table, std::span<const TokenId> tokens,
                     int n, int m, int vocab, std::vector<double>& prefix) {
  prefix.resize(static_cast<std::size_t>(n) * m);
  for (int k = 0; k < n; ++k) {
    const double* row = table.data() + static_cast<std::size_t>(k) * vocab;
    double* out = prefix.data() + static_cast<std::size_t>(k) * m;
    if (k == 0) {
      for (int j = 0; j < m; ++j) out[j] = row[tokens[j] - 1];
    } else {
      const double* prev = out - m;
      out[0] = row[tokens[0] - 1];
      for (int j = 1; j < m; ++j) out[j] = row[tokens[j] - 1] + prev[j - 1];
    }
  }
}

double window_sum(const std::vector<double>& prefix, int m, int klo, int jlo, int len) {
  const std::size_t end = static_cast<std::size_t>(klo + len - 1) * m + (jlo + len - 1);
  double s = prefix[end];
  if (klo > 0 && jlo > 0) s -= prefix[static_cast<std::size_t>(klo - 1) * m + (jlo - 1)];
  return s;
}

// phi_i = max_k of the measure between the clamped key window around k and
// the clamped token window around i, for every i.
std::vector<double> window_phis_additive(const KeySequence& keys,
                                         std::span<const TokenId> tokens,
                                         MeasureType type, int window_B,
                                         std::vector<double>& prefix_scratch) {
  const int n = keys.size();
  const int m = static_cast<int>(tokens.size());
  const int half = window_B / 2;
  const std::vector<double> table = score_table(keys, type);
  diagonal_prefix(table, tokens, n, m, keys.vocab_size, prefix_scratch);
  std::vector<double> phis(m);
  for (int i = 0; i < m; ++i) {
    const int ilo = std::max(0, i - half);
    const int ihi = std::min(m - 1, i + half);
    const int ilen = ihi - ilo + 1;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      const int klo = std::max(0, k - half);
      const int klen = std::min(n - 1, k + half) - klo + 1;
      const int len = std::min(ilen, klen);
      const double value = window_sum(prefix_scratch, m, klo, ilo, len) / len;
      if (value > best) best = value;
    }
    phis[i] = best;
  }
  return phis;
}

std::vector<double> window_phis_levenshtein(const KeySequence& keys,
                                            std::span<const TokenId> tokens,
                                            const MeasureKind& kind, int window_B) {
  const int n = keys.size();
  const int m = static_cast<int>(tokens.size());
  const int half = window_B / 2;
  std::vector<double> phis(m);
  for (int i = 0; i < m; ++i) {
    const int ilo = std::max(0, i - half);
    const int ihi = std::min(m - 1, i + half);
    const auto window = tokens.subspan(ilo, ihi - ilo + 1);
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      const int klo = std::max(0, k - half);
      const int klen = std::min(n - 1, k + half) - klo + 1;
      best = std::max(best, measure_slice(kind, keys, klo, klen, window));
    }
    phis[i] = best;
  }
  return phis;
}

std::vector<double> window_phis(const KeySequence& keys, std::span<const TokenId> tokens,
                                const MeasureKind& kind, int window_B,
                                std::vector<double>& prefix_scratch) {
  if (is_levenshtein(kind.type)) {
    return window_phis_levenshtein(keys, tokens, kind, window_B);
  }
  return window_phis_additive(keys, tokens, kind.type, window_B, prefix_scratch);
}

KeySequence replicate_keys(const TestConfig& config, Scheme scheme, int n,
                           int vocab_size, int t) {
  const std::uint64_t seed =
      mix64(mix64(config.seed, stream_tag::kReplicateKeys), static_cast<std::uint64_t>(t));
  return gen_keys(scheme, n, vocab_size, seed);
}

}  // namespace

void validate_test_config(const TestConfig& config) {
  if (config.window_B < 2 || config.window_B % 2 != 0) {
    throw std::invalid_argument("window_B must be a positive even integer");
  }
  if (config.replicates_T < 1) {
    throw std::invalid_argument("replicates_T must be >= 1");
  }
  if (is_levenshtein(config.measure.type) && !(config.measure.gamma >= 0.0)) {
    throw std::invalid_argument("gamma must be >= 0");
  }
}

double randomization_pvalue(double observed, std::span<const double> replicates) {
  if (replicates.empty()) {
    throw std::invalid_argument("randomization_pvalue needs at least one replicate");
  }
  int count = 0;
  for (const double r : replicates) {
    if (observed <= r) ++count;
  }
  return static_cast<double>(1 + count) / static_cast<double>(replicates.size() + 1);
}

double global_scan_stat(const KeySequence& keys, const TokenSequence& text,
                        int window_B, const MeasureKind& kind) {
  const int n = keys.size();
  const int m = text.size();
  if (window_B < 1 || window_B > std::min(n, m)) {
    throw std::invalid_argument("window_B must satisfy 1 <= B <= min(n, m)");
  }
  if (scheme_for(kind.type) != keys.scheme) {
    throw std::invalid_argument("measure does not match the key scheme");
  }
  validate_tokens(text.tokens, keys.vocab_size);
  double best = -std::numeric_limits<double>::infinity();
  if (is_levenshtein(kind.type)) {
    for (int a = 0; a + window_B <= n; ++a) {
      for (int b = 0; b + window_B <= m; ++b) {
        const auto window =
            std::span<const TokenId>(text.tokens).subspan(b, window_B);
        best = std::max(best, measure_slice(kind, keys, a, window_B, window));
      }
    }
    return best;
  }
  const std::vector<double> table = score_table(keys, kind.type);
  std::vector<double> prefix;
  diagonal_prefix(table, text.tokens, n, m, keys.vocab_size, prefix);
  for (int a = 0; a + window_B <= n; ++a) {
    for (int b = 0; b + window_B <= m; ++b) {
      best = std::max(best, window_sum(prefix, m, a, b, window_B));
    }
  }
  return best / window_B;
}

double global_test(const KeySequence& keys, const TokenSequence& text,
                   const TestConfig& config, int jobs) {
  validate_test_config(config);
  const double observed = global_scan_stat(keys, text, config.window_B, config.measure);
  std::vector<double> stats(config.replicates_T);
  parallel_for(stats.size(), jobs, [&](std::size_t t) {
    const KeySequence rep = replicate_keys(config, keys.scheme, keys.size(),
                                           keys.vocab_size, static_cast<int>(t) + 1);
    stats[t] = global_scan_stat(rep, text, config.window_B, config.measure);
  });
  return randomization_pvalue(observed, stats);
}

PValueSequence window_pvalues(const KeySequence& keys, const TokenSequence& text,
                              const TestConfig& config, int jobs) {
  validate_test_config(config);
  const int m = text.size();
  const int n = keys.size();
  if (n < 1 || m < 1) throw std::invalid_argument("keys and text must be nonempty");
  if (config.window_B / 2 >= m) {
    throw std::invalid_argument("window_B/2 must be smaller than the text length");
  }
  if (scheme_for(config.measure.type) != keys.scheme) {
    throw std::invalid_argument("measure does not match the key scheme");
  }
  validate_tokens(text.tokens, keys.vocab_size);

  std::vector<double> scratch;
  const std::vector<double> observed =
      window_phis(keys, text.tokens, config.measure, config.window_B, scratch);

  // One shared set of replicate key sequences serves every window.
  const int reps = config.replicates_T;
  std::vector<std::vector<double>> replicate_phis(reps);
  parallel_for(static_cast<std::size_t>(reps), jobs, [&](std::size_t t) {
    const KeySequence rep =
        replicate_keys(config, keys.scheme, n, keys.vocab_size, static_cast<int>(t) + 1);
    std::vector<double> local_scratch;
    replicate_phis[t] =
        window_phis(rep, text.tokens, config.measure, config.window_B, local_scratch);
  });

  PValueSequence out;
  out.window_B = config.window_B;
  out.replicates_T = reps;
  out.measure = config.measure;
  out.pvals.resize(m);
  for (int i = 0; i < m; ++i) {
    int count = 0;
    for (int t = 0; t < reps; ++t) {
      if (observed[i] <= replicate_phis[t][i]) ++count;
    }
    out.pvals[i] = static_cast<double>(1 + count) / static_cast<double>(reps + 1);
  }
  return out;
}

}  // namespace wmseg
