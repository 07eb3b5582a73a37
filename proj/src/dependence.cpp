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

#include "wmseg/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wmseg {

namespace {

constexpr double kXiClampLo = 1e-15;
constexpr double kXiClampHi = 1.0 - 1e-15;

double clamp_xi(double xi) { return std::clamp(xi, kXiClampLo, kXiClampHi); }

// d_gamma by dynamic programming over the (len(tokens)+1) x (len(keys)+1)
// table; boundaries are gamma * remaining length, the transition is
// min(diag + d0, left + gamma, up + gamma). Negative base costs (the EMS
// variant) need no special handling.
template <typename Key, typename BaseCost>
double levenshtein_dp(std::span<const TokenId> tokens, std::span<const Key> keys,
                      double gamma, BaseCost d0) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  const std::size_t nt = tokens.size();
  const std::size_t nk = keys.size();
  std::vector<double> prev(nk + 1), cur(nk + 1);
  for (std::size_t j = 0; j <= nk; ++j) prev[j] = gamma * static_cast<double>(j);
  for (std::size_t i = 1; i <= nt; ++i) {
    cur[0] = gamma * static_cast<double>(i);
    for (std::size_t j = 1; j <= nk; ++j) {
      const double match = prev[j - 1] + d0(tokens[i - 1], keys[j - 1]);
      const double skip_key = cur[j - 1] + gamma;
      const double skip_token = prev[j] + gamma;
      cur[j] = std::min({match, skip_key, skip_token});
    }
    std::swap(prev, cur);
  }
  return prev[nk];
}

}  // namespace

std::string to_string(MeasureType t) {
  switch (t) {
    case MeasureType::kIts: return "its";
    case MeasureType::kItsl: return "itsl";
    case MeasureType::kEms: return "ems";
    case MeasureType::kEmsl: return "emsl";
  }
  throw std::logic_error("unreachable measure type");
}

MeasureType measure_type_from_string(const std::string& s) {
  if (s == "its") return MeasureType::kIts;
  if (s == "itsl") return MeasureType::kItsl;
  if (s == "ems") return MeasureType::kEms;
  if (s == "emsl") return MeasureType::kEmsl;
  throw std::invalid_argument("unknown measure: " + s);
}

double m_its(std::span<const ItsKey> keys, std::span<const TokenId> tokens,
             int vocab_size) {
  if (keys.size() != tokens.size() || keys.empty()) {
    throw std::invalid_argument("m_its needs equal, nonempty slices");
  }
  const double denom = static_cast<double>(vocab_size - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const TokenId y = tokens[i];
    const double rank = static_cast<double>(keys[i].pi[y - 1]);
    total += (keys[i].u - 0.5) * ((rank - 1.0) / denom - 0.5);
  }
  return total / static_cast<double>(keys.size());
}

double m_ems(std::span<const EmsKey> keys, std::span<const TokenId> tokens) {
  if (keys.size() != tokens.size() || keys.empty()) {
    throw std::invalid_argument("m_ems needs equal, nonempty slices");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    total += std::log(clamp_xi(keys[i].xi[tokens[i] - 1])) + 1.0;
  }
  return total / static_cast<double>(keys.size());
}

double levenshtein_cost_its(std::span<const TokenId> tokens,
                            std::span<const ItsKey> keys, double gamma,
                            int vocab_size) {
  const double denom = static_cast<double>(vocab_size - 1);
  return levenshtein_dp(tokens, keys, gamma, [denom](TokenId y, const ItsKey& k) {
    return std::fabs(k.u - (static_cast<double>(k.pi[y - 1]) - 1.0) / denom);
  });
}

double levenshtein_cost_ems(std::span<const TokenId> tokens,
                            std::span<const EmsKey> keys, double gamma) {
  return levenshtein_dp(tokens, keys, gamma, [](TokenId y, const EmsKey& k) {
    return std::log(1.0 - clamp_xi(k.xi[y - 1]));
  });
}

double measure_slice(const MeasureKind& kind, const KeySequence& keys,
                     int key_begin, int key_count,
                     std::span<const TokenId> tokens) {
  if (scheme_for(kind.type) != keys.scheme) {
    throw std::invalid_argument("measure does not match the key scheme");
  }
  if (key_begin < 0 || key_count < 0 || key_begin + key_count > keys.size()) {
    throw std::invalid_argument("key slice out of range");
  }
  validate_tokens(tokens, keys.vocab_size);
  switch (kind.type) {
    case MeasureType::kIts:
      return m_its({keys.its.data() + key_begin, static_cast<std::size_t>(key_count)},
                   tokens, keys.vocab_size);
    case MeasureType::kEms:
      return m_ems({keys.ems.data() + key_begin, static_cast<std::size_t>(key_count)},
                   tokens);
    case MeasureType::kItsl:
      return -levenshtein_cost_its(
          tokens, {keys.its.data() + key_begin, static_cast<std::size_t>(key_count)},
          kind.gamma, keys.vocab_size);
    case MeasureType::kEmsl:
      return -levenshtein_cost_ems(
          tokens, {keys.ems.data() + key_begin, static_cast<std::size_t>(key_count)},
          kind.gamma);
  }
  throw std::logic_error("unreachable measure type");
}

double measure(const MeasureKind& kind, const KeySequence& keys,
               std::span<const TokenId> tokens) {
  return measure_slice(kind, keys, 0, keys.size(), tokens);
}

}  // namespace wmseg
