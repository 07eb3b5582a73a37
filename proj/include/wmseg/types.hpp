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

#ifndef WMSEG_TYPES_HPP_
#define WMSEG_TYPES_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wmseg {

// Tokens are 1-based indices into a vocabulary of size V.
using TokenId = std::int32_t;

enum class Provenance { kWatermarked, kPlain, kMixed };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct TokenSequence {
  std::vector<TokenId> tokens;
  Provenance provenance = Provenance::kPlain;

  int size() const { return static_cast<int>(tokens.size()); }
  bool empty() const { return tokens.empty(); }
};

// Throws std::invalid_argument unless every token lies in [1, vocab_size].
void validate_tokens(std::span<const TokenId> tokens, int vocab_size);

// A next-token distribution must have vocab_size nonnegative entries
// summing to 1 within 1e-12.
void validate_distribution(std::span<const double> probs, int vocab_size);

}  // namespace wmseg

#endif  // WMSEG_TYPES_HPP_
