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

#ifndef WMSEG_DEPENDENCE_HPP_
#define WMSEG_DEPENDENCE_HPP_

#include <span>
#include <string>

#include "wmseg/types.hpp"
#include "wmseg/watermark.hpp"

namespace wmseg {

enum class MeasureType { kIts, kItsl, kEms, kEmsl };

std::string to_string(MeasureType t);
MeasureType measure_type_from_string(const std::string& s);

// Dependence measure selector; gamma is the indel penalty of the
// Levenshtein variants and is ignored by ITS/EMS.
struct MeasureKind {
  MeasureType type = MeasureType::kEms;
  double gamma = 0.4;
};

inline bool is_levenshtein(MeasureType t) {
  return t == MeasureType::kItsl || t == MeasureType::kEmsl;
}
inline Scheme scheme_for(MeasureType t) {
  return (t == MeasureType::kIts || t == MeasureType::kItsl) ? Scheme::kIts
                                                             : Scheme::kEms;
}

// Larger score = more evidence that the tokens were generated with the keys.

// (1/n) sum (u_i - 1/2)((pi_i(y_i) - 1)/(V - 1) - 1/2); each summand is
// bounded by 1/4 in absolute value.
double m_its(std::span<const ItsKey> keys, std::span<const TokenId> tokens,
             int vocab_size);

// (1/n) sum (log xi_{i, y_i} + 1); xi clamped to [1e-15, 1-1e-15] before
// the log so scores stay finite.
double m_ems(std::span<const EmsKey> keys, std::span<const TokenId> tokens);

// Alignment cost d_gamma between a token slice and a key slice: dynamic
// program over the (len(tokens)+1) x (len(keys)+1) table with indel
// penalty gamma and per-pair base cost d0. Base cost is
// |u - (pi(y)-1)/(V-1)| for the ITS keys and log(1 - xi_y) for EMS keys.
double levenshtein_cost_its(std::span<const TokenId> tokens,
                            std::span<const ItsKey> keys, double gamma,
                            int vocab_size);
double levenshtein_cost_ems(std::span<const TokenId> tokens,
                            std::span<const EmsKey> keys, double gamma);

// Dispatch on kind: m_its / m_ems (equal slice lengths required) or the
// negated Levenshtein cost (any lengths).
double measure_slice(const MeasureKind& kind, const KeySequence& keys,
                     int key_begin, int key_count,
                     std::span<const TokenId> tokens);

// Full-sequence convenience wrapper.
double measure(const MeasureKind& kind, const KeySequence& keys,
               std::span<const TokenId> tokens);

}  // namespace wmseg

#endif  // WMSEG_DEPENDENCE_HPP_
