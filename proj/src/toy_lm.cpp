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

#include "wmseg/toy_lm.hpp"

#include <stdexcept>

#include "wmseg/rng.hpp"

namespace wmseg {

namespace {

// Symmetric Dirichlet(beta) draw via normalized gammas.
std::vector<double> dirichlet_row(int vocab_size, double beta, Rng& rng) {
  std::vector<double> row(vocab_size);
  double total = 0.0;
  for (auto& entry : row) {
    entry = rng.gamma(beta);
    total += entry;
  }
  if (total <= 0.0) {
    // Possible for tiny beta when every gamma draw underflows; fall back
    // to unit mass on the largest draw position (index 0 after all-zero).
    row.assign(vocab_size, 0.0);
    row[0] = 1.0;
    return row;
  }
  for (auto& entry : row) entry /= total;
  return row;
}

}  // namespace

TokenModel new_markov_model(int vocab_size, double beta, std::uint64_t seed) {
  if (vocab_size < 2) throw std::invalid_argument("vocab_size must be >= 2");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  TokenModel model;
  model.vocab_size = vocab_size;
  model.beta = beta;
  model.seed = seed;
  const std::uint64_t row_seed = mix64(seed, stream_tag::kModelRow);
  {
    Rng rng(mix64(row_seed, 0));
    model.initial = dirichlet_row(vocab_size, beta, rng);
  }
  model.transition.reserve(vocab_size);
  for (int prev = 1; prev <= vocab_size; ++prev) {
    Rng rng(mix64(row_seed, static_cast<std::uint64_t>(prev)));
    model.transition.push_back(dirichlet_row(vocab_size, beta, rng));
  }
  return model;
}

TokenModel model_from_rows(int vocab_size, std::vector<double> initial,
                           std::vector<std::vector<double>> transition,
                           double beta, std::uint64_t seed) {
  if (vocab_size < 2) throw std::invalid_argument("vocab_size must be >= 2");
  if (static_cast<int>(transition.size()) != vocab_size) {
    throw std::invalid_argument("need one transition row per token");
  }
  validate_distribution(initial, vocab_size);
  for (const auto& row : transition) validate_distribution(row, vocab_size);
  TokenModel model;
  model.vocab_size = vocab_size;
  model.beta = beta;
  model.seed = seed;
  model.initial = std::move(initial);
  model.transition = std::move(transition);
  return model;
}

const std::vector<double>& next_token_dist(const TokenModel& model,
                                           const TokenSequence& context) {
  if (context.empty()) return model.initial;
  const TokenId last = context.tokens.back();
  if (last < 1 || last > model.vocab_size) {
    throw std::invalid_argument("context token " + std::to_string(last) +
                                " outside vocabulary");
  }
  return model.row_for(last);
}

TokenId sample_from_distribution(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  TokenId last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double p = probs[k];
    if (p <= 0.0) continue;
    last_positive = static_cast<TokenId>(k + 1);
    cumulative += p;
    if (u <= cumulative) return last_positive;
  }
  if (last_positive == 0) throw std::invalid_argument("distribution has no mass");
  return last_positive;  // guards against cumulative rounding below 1
}

TokenSequence sample_plain(const TokenModel& model, const TokenSequence& prompt,
                           int count, std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("count must be >= 0");
  validate_tokens(prompt.tokens, model.vocab_size);
  TokenSequence out;
  out.provenance = Provenance::kPlain;
  out.tokens.reserve(count);
  Rng rng(mix64(seed, stream_tag::kPlainSample));
  TokenId last = prompt.empty() ? 0 : prompt.tokens.back();
  for (int i = 0; i < count; ++i) {
    const std::vector<double>& row = last == 0 ? model.initial : model.row_for(last);
    last = sample_from_distribution(row, rng.uniform());
    out.tokens.push_back(last);
  }
  return out;
}

}  // namespace wmseg
