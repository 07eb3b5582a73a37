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

#ifndef WMSEG_WATERMARK_HPP_
#define WMSEG_WATERMARK_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wmseg/toy_lm.hpp"
#include "wmseg/types.hpp"

namespace wmseg {

// Inverse-transform-sampling key: a uniform quantile u and a permutation
// of the vocabulary. pi[token-1] is the rank of `token` in [1, V].
struct ItsKey {
  double u = 0.0;
  std::vector<std::int32_t> pi;
};

// Exponential-minimum-sampling key: V independent uniforms in (0, 1).
struct EmsKey {
  std::vector<double> xi;
};

enum class Scheme { kIts, kEms };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

// Per-position key sequence; reconstructs bit-exactly from
// (scheme, size, vocab_size, seed) because key i is drawn from the
// counter-based substream (seed, i).
struct KeySequence {
  Scheme scheme = Scheme::kEms;
  int vocab_size = 0;
  std::uint64_t seed = 0;
  std::vector<ItsKey> its;
  std::vector<EmsKey> ems;

  int size() const {
    return static_cast<int>(scheme == Scheme::kIts ? its.size() : ems.size());
  }
};

KeySequence gen_keys(Scheme scheme, int n, int vocab_size, std::uint64_t seed);

// Decoder of Example-1 type: the token whose pi-ordered cumulative mass
// interval (lower, upper] contains u; u=0 goes to the first positive-mass
// interval. Zero-mass tokens can never win.
TokenId decode_its(const ItsKey& key, std::span<const double> dist);

// Decoder of Example-2 type: argmin_k -log(xi_k)/p_k, zero-probability
// tokens treated as +inf, ties to the smallest token index.
TokenId decode_ems(const EmsKey& key, std::span<const double> dist);

// Autoregressively applies the scheme's decoder once per key.
TokenSequence generate_watermarked(const TokenModel& model,
                                   const TokenSequence& prompt,
                                   const KeySequence& keys);

}  // namespace wmseg

#endif  // WMSEG_WATERMARK_HPP_
