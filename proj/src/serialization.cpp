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

#include "wmseg/serialization.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wmseg {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  if (result.ec != std::errc{}) throw std::runtime_error("failed to format double");
  return std::string(buf, result.ptr);
}

json model_to_json(const TokenModel& model) {
  json rows = json::array();
  rows.push_back(model.initial);
  for (const auto& row : model.transition) rows.push_back(row);
  return json{{"vocab_size", model.vocab_size},
              {"beta", model.beta},
              {"seed", model.seed},
              {"rows", rows}};
}

TokenModel model_from_json(const json& j) {
  const int vocab_size = j.at("vocab_size").get<int>();
  const auto& rows = j.at("rows");
  if (static_cast<int>(rows.size()) != vocab_size + 1) {
    throw std::invalid_argument("model needs an initial row plus one row per token");
  }
  std::vector<double> initial = rows.at(0).get<std::vector<double>>();
  std::vector<std::vector<double>> transition;
  transition.reserve(vocab_size);
  for (int i = 1; i <= vocab_size; ++i) {
    transition.push_back(rows.at(i).get<std::vector<double>>());
  }
  return model_from_rows(vocab_size, std::move(initial), std::move(transition),
                         j.at("beta").get<double>(), j.at("seed").get<std::uint64_t>());
}

json keys_to_json(const KeySequence& keys) {
  json entries = json::array();
  if (keys.scheme == Scheme::kIts) {
    for (const auto& key : keys.its) entries.push_back(json{{"u", key.u}, {"pi", key.pi}});
  } else {
    for (const auto& key : keys.ems) entries.push_back(json{{"xi", key.xi}});
  }
  return json{{"scheme", to_string(keys.scheme)},
              {"vocab_size", keys.vocab_size},
              {"seed", keys.seed},
              {"n", keys.size()},
              {"keys", entries}};
}

KeySequence keys_from_json(const json& j) {
  KeySequence keys;
  keys.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  keys.vocab_size = j.at("vocab_size").get<int>();
  keys.seed = j.at("seed").get<std::uint64_t>();
  if (keys.vocab_size < 2) throw std::invalid_argument("vocab_size must be >= 2");
  const auto& entries = j.at("keys");
  const int n = j.at("n").get<int>();
  if (static_cast<int>(entries.size()) != n) {
    throw std::invalid_argument("key count does not match header");
  }
  if (keys.scheme == Scheme::kIts) {
    keys.its.reserve(n);
    for (const auto& entry : entries) {
      ItsKey key;
      key.u = entry.at("u").get<double>();
      key.pi = entry.at("pi").get<std::vector<std::int32_t>>();
      if (!(key.u >= 0.0 && key.u <= 1.0)) {
        throw std::invalid_argument("u must lie in [0, 1]");
      }
      if (static_cast<int>(key.pi.size()) != keys.vocab_size) {
        throw std::invalid_argument("permutation length must equal vocab_size");
      }
      std::vector<bool> seen(keys.vocab_size, false);
      for (const auto rank : key.pi) {
        if (rank < 1 || rank > keys.vocab_size || seen[rank - 1]) {
          throw std::invalid_argument("pi must be a permutation of 1..V");
        }
        seen[rank - 1] = true;
      }
      keys.its.push_back(std::move(key));
    }
  } else {
    keys.ems.reserve(n);
    for (const auto& entry : entries) {
      EmsKey key;
      key.xi = entry.at("xi").get<std::vector<double>>();
      if (static_cast<int>(key.xi.size()) != keys.vocab_size) {
        throw std::invalid_argument("xi length must equal vocab_size");
      }
      for (const double x : key.xi) {
        if (!(x > 0.0 && x < 1.0)) {
          throw std::invalid_argument("xi entries must lie strictly in (0, 1)");
        }
      }
      keys.ems.push_back(std::move(key));
    }
  }
  return keys;
}

json text_to_json(const TokenSequence& text, int vocab_size) {
  return json{{"vocab_size", vocab_size},
              {"provenance", to_string(text.provenance)},
              {"tokens", text.tokens}};
}

TokenSequence text_from_json(const json& j, int* vocab_size) {
  TokenSequence text;
  text.provenance = provenance_from_string(j.at("provenance").get<std::string>());
  text.tokens = j.at("tokens").get<std::vector<TokenId>>();
  const int vocab = j.contains("vocab_size") ? j.at("vocab_size").get<int>() : 0;
  if (vocab > 0) validate_tokens(text.tokens, vocab);
  if (vocab_size != nullptr) *vocab_size = vocab;
  return text;
}

json truth_to_json(const GroundTruth& truth) {
  json labels = json::array();
  for (const auto label : truth.labels) labels.push_back(to_string(label));
  return json{{"length", truth.length},
              {"change_points", truth.change_points},
              {"labels", labels}};
}

GroundTruth truth_from_json(const json& j) {
  GroundTruth truth;
  truth.length = j.at("length").get<int>();
  truth.change_points = j.at("change_points").get<std::vector<int>>();
  for (const auto& label : j.at("labels")) {
    const std::string s = label.get<std::string>();
    truth.labels.push_back(s == "watermarked" ? SegmentLabel::kWatermarked
                                              : SegmentLabel::kNonWatermarked);
  }
  return truth;
}

json segmentation_to_json(const SegmentationResult& result) {
  json segments = json::array();
  for (const auto& seg : result.segments) {
    segments.push_back(json{{"lo", seg.lo},
                            {"hi", seg.hi},
                            {"label", to_string(seg.label)},
                            {"median_p", seg.median_p}});
  }
  json candidates = json::array();
  for (const auto& cand : result.candidates) {
    candidates.push_back(json{{"lo", cand.interval.lo},
                              {"hi", cand.interval.hi},
                              {"tau_hat", cand.tau_hat},
                              {"stat", cand.stat},
                              {"p_tilde", cand.p_tilde},
                              {"accepted", cand.accepted}});
  }
  return json{{"change_points", result.change_points},
              {"segments", segments},
              {"candidates", candidates}};
}

json report_to_json(const ExperimentReport& report) {
  const ExperimentConfig& c = report.config;
  json config{{"setting", c.setting},
              {"measure", to_string(c.measure.type)},
              {"gamma", c.measure.gamma},
              {"vocab_size", c.vocab_size},
              {"beta", c.beta},
              {"model_seed", c.model_seed},
              {"prompt_len", c.prompt_len},
              {"window_B", c.window_B},
              {"replicates_T", c.replicates_T},
              {"zeta", c.seg.threshold_zeta},
              {"decay_a", c.seg.decay_a},
              {"boot_block", c.seg.boot_block},
              {"boot_reps", c.seg.boot_reps},
              {"min_len", c.seg.min_len},
              {"master_seed", c.master_seed},
              {"n_seeds", c.n_seeds}};
  json results = json::array();
  json per_seed_ms = json::array();
  for (const auto& row : report.rows) {
    results.push_back(json{{"seed", row.trial_seed},
                           {"detected", row.detected},
                           {"rand_index", row.rand_index},
                           {"n_detected", row.n_detected},
                           {"n_false_positive", row.n_false_positive}});
    per_seed_ms.push_back(row.runtime_ms);
  }
  json out{{"config", config}, {"results", results}};
  if (!report.rows.empty()) {
    out["aggregate"] = json{
        {"median_rand_index", report.median_rand_index()},
        {"rand_index_q25", report.quantile_rand_index(0.25)},
        {"rand_index_q75", report.quantile_rand_index(0.75)},
        {"median_false_positives", report.median_false_positives()},
        {"false_positives_q75", report.quantile_false_positives(0.75)}};
  }
  // Wall-clock timing is the only non-deterministic part of a report and
  // stays in its own key so primary results compare byte-for-byte.
  out["timing"] = json{{"per_seed_ms", per_seed_ms}};
  return out;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out = "seed,setting,measure,rand_index,n_detected,n_false_positive,runtime_ms\n";
  for (const auto& row : report.rows) {
    out += std::to_string(row.trial_seed);
    out += ',';
    out += std::to_string(report.config.setting);
    out += ',';
    out += to_string(report.config.measure.type);
    out += ',';
    out += format_double(row.rand_index);
    out += ',';
    out += std::to_string(row.n_detected);
    out += ',';
    out += std::to_string(row.n_false_positive);
    out += ',';
    out += format_double(row.runtime_ms);
    out += '\n';
  }
  return out;
}

std::string pvalues_to_csv(const PValueSequence& seq) {
  std::string out = "index,p\n";
  for (std::size_t i = 0; i < seq.pvals.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += format_double(seq.pvals[i]);
    out += '\n';
  }
  return out;
}

PValueSequence pvalues_from_csv(const std::string& csv) {
  PValueSequence seq;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "index,p") {
    throw std::invalid_argument("p-value CSV must start with header 'index,p'");
  }
  std::size_t expected = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("malformed p-value CSV row: " + line);
    }
    const std::size_t index = std::stoull(line.substr(0, comma));
    if (index != expected) {
      throw std::invalid_argument("p-value CSV rows must be consecutive from 1");
    }
    const std::string value = line.substr(comma + 1);
    double p = 0.0;
    const auto result = std::from_chars(value.data(), value.data() + value.size(), p);
    if (result.ec != std::errc{} || !(p > 0.0 && p <= 1.0)) {
      throw std::invalid_argument("invalid p-value: " + value);
    }
    seq.pvals.push_back(p);
    ++expected;
  }
  return seq;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json_file(const std::string& path) {
  return json::parse(read_file(path));
}

void write_json_file(const std::string& path, const json& j) {
  write_file(path, j.dump(2) + "\n");
}

}  // namespace wmseg
