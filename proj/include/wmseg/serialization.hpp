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

#ifndef WMSEG_SERIALIZATION_HPP_
#define WMSEG_SERIALIZATION_HPP_

#include <string>

#include <json.hpp>

#include "wmseg/attacks.hpp"
#include "wmseg/experiment.hpp"
#include "wmseg/rtest.hpp"
#include "wmseg/segmentation.hpp"
#include "wmseg/toy_lm.hpp"
#include "wmseg/types.hpp"
#include "wmseg/watermark.hpp"

namespace wmseg {

// JSON round trips are bit-exact for doubles (shortest round-trip float
// formatting on write, exact parse on read).

nlohmann::json model_to_json(const TokenModel& model);
TokenModel model_from_json(const nlohmann::json& j);

nlohmann::json keys_to_json(const KeySequence& keys);
KeySequence keys_from_json(const nlohmann::json& j);

nlohmann::json text_to_json(const TokenSequence& text, int vocab_size);
// Returns the sequence and fills vocab_size if present (0 when absent).
TokenSequence text_from_json(const nlohmann::json& j, int* vocab_size = nullptr);

nlohmann::json truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const nlohmann::json& j);

nlohmann::json segmentation_to_json(const SegmentationResult& result);

nlohmann::json report_to_json(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);

// CSV with header "index,p", one row per position, full-precision floats.
std::string pvalues_to_csv(const PValueSequence& seq);
PValueSequence pvalues_from_csv(const std::string& csv);

// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace wmseg

#endif  // WMSEG_SERIALIZATION_HPP_
