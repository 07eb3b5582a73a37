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

#include "wmseg/watermark.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wmseg/rng.hpp"

namespace wmseg {

std::string to_string(Scheme s) {
  return s == Scheme::kIts ? "its" : "ems";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "its") return Scheme::kIts;
  if (s == "ems") return Scheme::kEms;
  throw std::invalid_argument("unknown scheme: " + s);
}

KeySequence gen_keys(Scheme scheme, int n, int vocab_size, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("key count must be >= 1");
  if (vocab_size < 2) throw std::invalid_argument("vocab_size must be >= 2");
  KeySequence keys;
  keys.scheme = scheme;
  keys.vocab_size = vocab_size;
  keys.seed = seed;
  const std::uint64_t base = mix64(seed, stream_tag::kKey);
  if (scheme == Scheme::kIts) {
    keys.its.resize(n);
    for (int i = 0; i < n; ++i) {
      Rng rng(mix64(base, static_cast<std::uint64_t>(i)));
      // Fisher-Yates on the token order, then invert to token -> rank.
      std::vector<std::int32_t> order(vocab_size);
      std::iota(order.begin(), order.end(), 1);
      for (int j = vocab_size - 1; j > 0; --j) {
        const auto k = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
        std::swap(order[j], order[k]);
      }
      ItsKey& key = keys.its[i];
      key.pi.resize(vocab_size);
      for (int rank = 1; rank <= vocab_size; ++rank) {
        key.pi[order[rank - 1] - 1] = rank;
      }
      key.u = rng.uniform();
    }
  } else {
    keys.ems.resize(n);
    for (int i = 0; i < n; ++i) {
      Rng rng(mix64(base, static_cast<std::uint64_t>(i)));
      EmsKey& key = keys.ems[i];
      key.xi.resize(vocab_size);
      for (auto& x : key.xi) x = rng.uniform_open();
    }
  }
  return keys;
}

TokenId decode_its(const ItsKey& key, std::span<const double> dist) {
  const int vocab_size = static_cast<int>(dist.size());
  if (static_cast<int>(key.pi.size()) != vocab_size) {
    throw std::invalid_argument("key permutation length does not match distribution");
  }
  // Tokens ordered by rank; the winning token owns the pi-ordered
  // cumulative-mass interval containing u.
  std::vector<TokenId> by_rank(vocab_size);
  for (int token = 1; token <= vocab_size; ++token) {
    by_rank[key.pi[token - 1] - 1] = token;
  }
  double cumulative = 0.0;
  TokenId last_positive = 0;
  for (const TokenId token : by_rank) {
    const double p = dist[token - 1];
    if (p <= 0.0) continue;
    last_positive = token;
    cumulative += p;
    if (key.u <= cumulative) return token;
  }
  if (last_positive == 0) throw std::invalid_argument("distribution has no mass");
  return last_positive;
}

TokenId decode_ems(const EmsKey& key, std::span<const double> dist) {
  if (key.xi.size() != dist.size()) {
    throw std::invalid_argument("key length does not match distribution");
  }
  double best_cost = std::numeric_limits<double>::infinity();
  TokenId best = 0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const double p = dist[k];
    if (p <= 0.0) continue;  // cost +inf, can never win
    const double cost = -std::log(key.xi[k]) / p;
    if (cost < best_cost) {
      best_cost = cost;
      best = static_cast<TokenId>(k + 1);
    }
  }
  if (best == 0) throw std::invalid_argument("distribution has no mass");
  return best;
}

TokenSequence generate_watermarked(const TokenModel& model,
                                   const TokenSequence& prompt,
                                   const KeySequence& keys) {
  if (keys.vocab_size != model.vocab_size) {
    throw std::invalid_argument("key vocabulary does not match the model");
  }
  validate_tokens(prompt.tokens, model.vocab_size);
  TokenSequence out;
  out.provenance = Provenance::kWatermarked;
  const int n = keys.size();
  out.tokens.reserve(n);
  TokenId last = prompt.empty() ? 0 : prompt.tokens.back();
  for (int i = 0; i < n; ++i) {
    const std::vector<double>& row = last == 0 ? model.initial : model.row_for(last);
    last = keys.scheme == Scheme::kIts ? decode_its(keys.its[i], row)
                                       : decode_ems(keys.ems[i], row);
    out.tokens.push_back(last);
  }
  return out;
}

}  // namespace wmseg
