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

#ifndef WMSEG_TOY_LM_HPP_
#define WMSEG_TOY_LM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "wmseg/types.hpp"

namespace wmseg {

// Order-1 Markov next-token model. Rows are drawn once at construction
// from a symmetric Dirichlet(beta); the model is immutable afterwards and
// reconstructs bit-identically from (vocab_size, beta, seed).
struct TokenModel {
  int vocab_size = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> initial;                   // context-free first-token row
  std::vector<std::vector<double>> transition;   // row per previous token

  const std::vector<double>& row_for(TokenId prev) const { return transition[prev - 1]; }
};

// Dirichlet(beta) rows from per-row substreams of `seed`.
TokenModel new_markov_model(int vocab_size, double beta, std::uint64_t seed);

// Test hook: build a model from explicit rows (e.g. degenerate unit-mass
// rows). Rows are validated; beta/seed are recorded as given.
TokenModel model_from_rows(int vocab_size, std::vector<double> initial,
                           std::vector<std::vector<double>> transition,
                           double beta = 0.0, std::uint64_t seed = 0);

// The initial row for an empty context, else the row of the last token.
const std::vector<double>& next_token_dist(const TokenModel& model,
                                           const TokenSequence& context);

// Inverse-CDF draw from `probs` at quantile u: the first positive-mass
// token whose cumulative mass reaches u (half-open intervals, u=0 goes to
// the first positive-mass token).
TokenId sample_from_distribution(std::span<const double> probs, double u);

// Autoregressive unwatermarked sampling; the stream is keyed by `seed`
// only, independent of any watermark key material.
TokenSequence sample_plain(const TokenModel& model, const TokenSequence& prompt,
                           int count, std::uint64_t seed);

}  // namespace wmseg

#endif  // WMSEG_TOY_LM_HPP_
