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

#include "wmseg/types.hpp"

#include <cmath>
#include <stdexcept>

namespace wmseg {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kWatermarked: return "watermarked";
    case Provenance::kPlain: return "plain";
    case Provenance::kMixed: return "mixed";
  }
  throw std::logic_error("unreachable provenance");
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "watermarked") return Provenance::kWatermarked;
  if (s == "plain") return Provenance::kPlain;
  if (s == "mixed") return Provenance::kMixed;
  throw std::invalid_argument("unknown provenance: " + s);
}

void validate_tokens(std::span<const TokenId> tokens, int vocab_size) {
  for (const TokenId t : tokens) {
    if (t < 1 || t > vocab_size) {
      throw std::invalid_argument("token " + std::to_string(t) +
                                  " outside vocabulary [1, " +
                                  std::to_string(vocab_size) + "]");
    }
  }
}

void validate_distribution(std::span<const double> probs, int vocab_size) {
  if (static_cast<int>(probs.size()) != vocab_size) {
    throw std::invalid_argument("distribution length " +
                                std::to_string(probs.size()) +
                                " does not match vocabulary size " +
                                std::to_string(vocab_size));
  }
  double total = 0.0;
  for (const double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("distribution entries must be finite and >= 0");
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("distribution entries must sum to 1 (got " +
                                std::to_string(total) + ")");
  }
}

}  // namespace wmseg
