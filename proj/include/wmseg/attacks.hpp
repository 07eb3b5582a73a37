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

#ifndef WMSEG_ATTACKS_HPP_
#define WMSEG_ATTACKS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "wmseg/segmentation.hpp"
#include "wmseg/toy_lm.hpp"
#include "wmseg/types.hpp"
#include "wmseg/watermark.hpp"

namespace wmseg {

// Positions are 1-based. Insert splices the filler before `pos`
// (pos = len+1 appends); substitute replaces tokens lo..hi in place;
// delete removes lo..hi.
TokenSequence attack_insert(const TokenSequence& text, int pos,
                            const TokenSequence& filler);
TokenSequence attack_substitute(const TokenSequence& text, int lo, int hi,
                                const TokenSequence& filler);
TokenSequence attack_delete(const TokenSequence& text, int lo, int hi);

// change_points use the segment-start convention (first index of each new
// segment); labels has one entry per segment.
struct GroundTruth {
  int length = 0;
  std::vector<int> change_points;
  std::vector<SegmentLabel> labels;
};

struct SettingData {
  TokenSequence text;
  KeySequence keys;
  GroundTruth truth;
};

// The four benchmark constructions:
//   1: 500 watermarked tokens, no change point.
//   2: 250 watermarked + 250 plain appended; truth {251}.
//   3: 500 watermarked, tokens 201..300 substituted with plain; {201, 301}.
//   4: 400 watermarked, 101..200 substituted with plain, 100 plain
//      inserted so they occupy 301..400; {101, 201, 301, 401}.
// Plain segments continue the chain from the preceding token.
SettingData build_setting(int setting, const TokenModel& model, Scheme scheme,
                          std::uint64_t seed, int prompt_len = 10);

// Rand index of the partitions of {1..m} induced by two change-point sets
// (segment starts). 1.0 iff the sets are equal.
double rand_index(std::span<const int> cps_a, std::span<const int> cps_b, int m);

}  // namespace wmseg

#endif  // WMSEG_ATTACKS_HPP_
