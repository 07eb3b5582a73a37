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

#include "wmseg/attacks.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include "wmseg/rng.hpp"

namespace wmseg {

namespace {

TokenSequence concat(const TokenSequence& a, std::span<const TokenId> b,
                     Provenance provenance) {
  TokenSequence out;
  out.provenance = provenance;
  out.tokens.reserve(a.tokens.size() + b.size());
  out.tokens = a.tokens;
  out.tokens.insert(out.tokens.end(), b.begin(), b.end());
  return out;
}

std::int64_t pairs(std::int64_t n) { return n * (n - 1) / 2; }

void validate_changepoints(std::span<const int> cps, int m) {
  int prev = 1;
  for (const int c : cps) {
    if (c <= prev || c > m) {
      throw std::invalid_argument("change points must be strictly increasing interior "
                                  "segment starts");
    }
    prev = c;
  }
}

}  // namespace

TokenSequence attack_insert(const TokenSequence& text, int pos,
                            const TokenSequence& filler) {
  if (pos < 1 || pos > text.size() + 1) {
    throw std::invalid_argument("insert position out of range");
  }
  if (filler.empty()) return text;
  TokenSequence out;
  out.provenance = Provenance::kMixed;
  out.tokens.reserve(text.tokens.size() + filler.tokens.size());
  out.tokens.assign(text.tokens.begin(), text.tokens.begin() + (pos - 1));
  out.tokens.insert(out.tokens.end(), filler.tokens.begin(), filler.tokens.end());
  out.tokens.insert(out.tokens.end(), text.tokens.begin() + (pos - 1), text.tokens.end());
  return out;
}

TokenSequence attack_substitute(const TokenSequence& text, int lo, int hi,
                                const TokenSequence& filler) {
  if (lo < 1 || hi < lo || hi > text.size()) {
    throw std::invalid_argument("substitution range out of range");
  }
  if (filler.size() != hi - lo + 1) {
    throw std::invalid_argument("filler length must equal the substituted range");
  }
  TokenSequence out;
  out.provenance = Provenance::kMixed;
  out.tokens = text.tokens;
  std::copy(filler.tokens.begin(), filler.tokens.end(), out.tokens.begin() + (lo - 1));
  return out;
}

TokenSequence attack_delete(const TokenSequence& text, int lo, int hi) {
  if (lo < 1 || hi < lo || hi > text.size()) {
    throw std::invalid_argument("deletion range out of range");
  }
  TokenSequence out;
  out.provenance = Provenance::kMixed;
  out.tokens.reserve(text.tokens.size() - (hi - lo + 1));
  out.tokens.assign(text.tokens.begin(), text.tokens.begin() + (lo - 1));
  out.tokens.insert(out.tokens.end(), text.tokens.begin() + hi, text.tokens.end());
  return out;
}

SettingData build_setting(int setting, const TokenModel& model, Scheme scheme,
                          std::uint64_t seed, int prompt_len) {
  if (setting < 1 || setting > 4) throw std::invalid_argument("setting must be 1..4");
  if (prompt_len < 0) throw std::invalid_argument("prompt_len must be >= 0");
  const TokenSequence prompt =
      sample_plain(model, {}, prompt_len, mix64(seed, stream_tag::kPrompt));
  const std::uint64_t key_seed = mix64(seed, stream_tag::kSettingKeys);
  const std::uint64_t plain_base = mix64(seed, stream_tag::kSettingPlain);

  SettingData data;
  switch (setting) {
    case 1: {
      data.keys = gen_keys(scheme, 500, model.vocab_size, key_seed);
      data.text = generate_watermarked(model, prompt, data.keys);
      data.truth.change_points = {};
      data.truth.labels = {SegmentLabel::kWatermarked};
      break;
    }
    case 2: {
      data.keys = gen_keys(scheme, 250, model.vocab_size, key_seed);
      const TokenSequence wm = generate_watermarked(model, prompt, data.keys);
      const TokenSequence context = concat(prompt, wm.tokens, Provenance::kMixed);
      const TokenSequence plain = sample_plain(model, context, 250, mix64(plain_base, 0));
      data.text = concat(wm, plain.tokens, Provenance::kMixed);
      data.truth.change_points = {251};
      data.truth.labels = {SegmentLabel::kWatermarked, SegmentLabel::kNonWatermarked};
      break;
    }
    case 3: {
      data.keys = gen_keys(scheme, 500, model.vocab_size, key_seed);
      const TokenSequence wm = generate_watermarked(model, prompt, data.keys);
      const TokenSequence context =
          concat(prompt, std::span<const TokenId>(wm.tokens).first(200),
                 Provenance::kMixed);
      const TokenSequence filler = sample_plain(model, context, 100, mix64(plain_base, 0));
      data.text = attack_substitute(wm, 201, 300, filler);
      data.truth.change_points = {201, 301};
      data.truth.labels = {SegmentLabel::kWatermarked, SegmentLabel::kNonWatermarked,
                           SegmentLabel::kWatermarked};
      break;
    }
    case 4: {
      data.keys = gen_keys(scheme, 400, model.vocab_size, key_seed);
      const TokenSequence wm = generate_watermarked(model, prompt, data.keys);
      const TokenSequence context1 =
          concat(prompt, std::span<const TokenId>(wm.tokens).first(100),
                 Provenance::kMixed);
      const TokenSequence filler1 =
          sample_plain(model, context1, 100, mix64(plain_base, 0));
      const TokenSequence substituted = attack_substitute(wm, 101, 200, filler1);
      const TokenSequence context2 =
          concat(prompt, std::span<const TokenId>(substituted.tokens).first(300),
                 Provenance::kMixed);
      const TokenSequence filler2 =
          sample_plain(model, context2, 100, mix64(plain_base, 1));
      // Filler occupies positions 301..400 of the final text.
      data.text = attack_insert(substituted, 301, filler2);
      data.truth.change_points = {101, 201, 301, 401};
      data.truth.labels = {SegmentLabel::kWatermarked, SegmentLabel::kNonWatermarked,
                           SegmentLabel::kWatermarked, SegmentLabel::kNonWatermarked,
                           SegmentLabel::kWatermarked};
      break;
    }
    default:
      break;
  }
  data.truth.length = data.text.size();
  return data;
}

double rand_index(std::span<const int> cps_a, std::span<const int> cps_b, int m) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  validate_changepoints(cps_a, m);
  validate_changepoints(cps_b, m);

  // Segment starts of both partitions, including the common [1, m+1) frame.
  std::vector<int> starts_a{1};
  starts_a.insert(starts_a.end(), cps_a.begin(), cps_a.end());
  starts_a.push_back(m + 1);
  std::vector<int> starts_b{1};
  starts_b.insert(starts_b.end(), cps_b.begin(), cps_b.end());
  starts_b.push_back(m + 1);

  std::vector<std::int64_t> size_a(starts_a.size() - 1, 0);
  std::vector<std::int64_t> size_b(starts_b.size() - 1, 0);
  std::int64_t same_same = 0;  // pair count within cluster intersections
  std::size_t ia = 0, ib = 0;
  int pos = 1;
  while (pos <= m) {
    const int end = std::min(starts_a[ia + 1], starts_b[ib + 1]) - 1;
    const std::int64_t len = end - pos + 1;
    same_same += pairs(len);
    size_a[ia] += len;
    size_b[ib] += len;
    pos = end + 1;
    if (pos == starts_a[ia + 1]) ++ia;
    if (pos == starts_b[ib + 1]) ++ib;
  }
  std::int64_t within_a = 0, within_b = 0;
  for (const std::int64_t s : size_a) within_a += pairs(s);
  for (const std::int64_t s : size_b) within_b += pairs(s);
  const std::int64_t total = pairs(m);
  const std::int64_t agreements = total + 2 * same_same - within_a - within_b;
  return static_cast<double>(agreements) / static_cast<double>(total);
}

}  // namespace wmseg
