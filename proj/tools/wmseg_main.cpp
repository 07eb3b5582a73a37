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
//
// Command line front end: generation, attacks, detection and segmentation
// pipelines over JSON/CSV files. All randomness flows from --seed; running
// a subcommand twice with the same flags produces byte-identical primary
// output files.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wmseg/experiment.hpp"
#include "wmseg/rng.hpp"
#include "wmseg/serialization.hpp"

namespace {

using nlohmann::json;
using namespace wmseg;

// Every run prints its fully resolved configuration as a single JSON line
// so outputs are attributable to exact parameter values.
void print_resolved(const std::string& subcommand, const json& config) {
  json header{{"subcommand", subcommand}, {"config", config}};
  std::cout << header.dump() << "\n";
}

int effective_T(int replicates, bool quick) { return quick ? 99 : replicates; }

// Appendix-style automatic window size 3*m^(1/3), rounded down to even so
// the moving windows can extend B/2 to each side.
int auto_window(int m) {
  int b = static_cast<int>(std::floor(3.0 * std::cbrt(static_cast<double>(m))));
  if (b % 2 != 0) --b;
  return std::max(2, b);
}

struct PipelineFlags {
  std::string measure = "ems";
  double gamma = 0.4;
  int window_B = 20;
  bool auto_window_flag = false;
  int replicates_T = 999;
  bool quick = false;
  int jobs = 1;
  std::uint64_t seed = 0;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& flags) {
  cmd->add_option("--measure", flags.measure, "Dependence measure: its|itsl|ems|emsl")
      ->check(CLI::IsMember({"its", "itsl", "ems", "emsl"}));
  cmd->add_option("--gamma", flags.gamma, "Indel penalty for itsl/emsl");
  cmd->add_option("--window-B", flags.window_B, "Sliding window size (even)");
  cmd->add_flag("--auto-window", flags.auto_window_flag,
                "Set the window to 3*m^(1/3) rounded down to even");
  cmd->add_option("--replicates-T", flags.replicates_T, "Randomization replicates");
  cmd->add_flag("--quick", flags.quick, "Use T=99 replicates");
  cmd->add_option("--jobs", flags.jobs, "Worker threads (outputs are independent of this)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", flags.seed, "Random seed");
}

struct SegmentFlags {
  double zeta = 0.005;
  double decay_a = 0.70710678118654752;
  int min_len = 50;
  int boot_block = 20;
  int boot_reps = 399;
  std::uint64_t seed = 0;
  int jobs = 1;
};

void add_segment_flags(CLI::App* cmd, SegmentFlags& flags, bool with_seed_jobs) {
  cmd->add_option("--zeta", flags.zeta, "Acceptance threshold for bootstrap p-values");
  cmd->add_option("--decay-a", flags.decay_a, "Seeded interval decay in [1/2, 1)");
  cmd->add_option("--min-len", flags.min_len, "Minimum seeded interval length");
  cmd->add_option("--boot-block", flags.boot_block, "Moving block bootstrap block size");
  cmd->add_option("--boot-reps", flags.boot_reps, "Bootstrap replicates");
  if (with_seed_jobs) {
    cmd->add_option("--seed", flags.seed, "Random seed");
    cmd->add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
  }
}

SegmentationConfig to_segmentation_config(const SegmentFlags& flags) {
  SegmentationConfig config;
  config.threshold_zeta = flags.zeta;
  config.decay_a = flags.decay_a;
  config.min_len = flags.min_len;
  config.boot_block = flags.boot_block;
  config.boot_reps = flags.boot_reps;
  config.seed = flags.seed;
  return config;
}

int run(int argc, char** argv) {
  CLI::App app{"Watermarked token generation, detection and segmentation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from a key=value file");

  // ---- model ----------------------------------------------------------
  auto* model_cmd = app.add_subcommand("model", "Create and serialize a token model");
  int model_vocab = 20;
  double model_beta = 5.0;
  std::uint64_t model_seed = 1;
  std::string model_out;
  model_cmd->add_option("--vocab-size", model_vocab, "Vocabulary size (>= 2)");
  model_cmd->add_option("--beta", model_beta, "Dirichlet concentration (> 0)");
  model_cmd->add_option("--seed", model_seed, "Random seed");
  model_cmd->add_option("--out", model_out, "Output model JSON")->required();
  model_cmd->callback([&] {
    print_resolved("model", json{{"vocab_size", model_vocab},
                                 {"beta", model_beta},
                                 {"seed", model_seed},
                                 {"out", model_out}});
    const TokenModel model = new_markov_model(model_vocab, model_beta, model_seed);
    write_json_file(model_out, model_to_json(model));
  });

  // ---- keys -----------------------------------------------------------
  auto* keys_cmd = app.add_subcommand("keys", "Generate a watermark key sequence");
  std::string keys_scheme = "ems";
  int keys_n = 500;
  int keys_vocab = 20;
  std::uint64_t keys_seed = 0;
  std::string keys_out;
  keys_cmd->add_option("--scheme", keys_scheme, "Key scheme: its|ems")
      ->check(CLI::IsMember({"its", "ems"}));
  keys_cmd->add_option("--n", keys_n, "Number of keys");
  keys_cmd->add_option("--vocab-size", keys_vocab, "Vocabulary size");
  keys_cmd->add_option("--seed", keys_seed, "Random seed");
  keys_cmd->add_option("--out", keys_out, "Output keys JSON")->required();
  keys_cmd->callback([&] {
    print_resolved("keys", json{{"scheme", keys_scheme},
                                {"n", keys_n},
                                {"vocab_size", keys_vocab},
                                {"seed", keys_seed},
                                {"out", keys_out}});
    const KeySequence keys =
        gen_keys(scheme_from_string(keys_scheme), keys_n, keys_vocab, keys_seed);
    write_json_file(keys_out, keys_to_json(keys));
  });

  // ---- generate -------------------------------------------------------
  auto* gen_cmd = app.add_subcommand("generate", "Generate watermarked text");
  std::string gen_model, gen_keys_path, gen_out;
  int gen_prompt_len = 10;
  std::uint64_t gen_seed = 0;
  gen_cmd->add_option("--model", gen_model, "Model JSON")->required();
  gen_cmd->add_option("--keys", gen_keys_path, "Keys JSON")->required();
  gen_cmd->add_option("--prompt-len", gen_prompt_len, "Plain prompt length");
  gen_cmd->add_option("--seed", gen_seed, "Seed for the prompt");
  gen_cmd->add_option("--out", gen_out, "Output text JSON")->required();
  gen_cmd->callback([&] {
    print_resolved("generate", json{{"model", gen_model},
                                    {"keys", gen_keys_path},
                                    {"prompt_len", gen_prompt_len},
                                    {"seed", gen_seed},
                                    {"out", gen_out}});
    const TokenModel model = model_from_json(read_json_file(gen_model));
    const KeySequence keys = keys_from_json(read_json_file(gen_keys_path));
    const TokenSequence prompt =
        sample_plain(model, {}, gen_prompt_len, mix64(gen_seed, stream_tag::kPrompt));
    const TokenSequence text = generate_watermarked(model, prompt, keys);
    write_json_file(gen_out, text_to_json(text, model.vocab_size));
  });

  // ---- attack ---------------------------------------------------------
  auto* attack_cmd = app.add_subcommand(
      "attack", "Edit a text (insert/substitute/delete) or build a benchmark setting");
  std::string atk_text, atk_model, atk_out, atk_scheme = "ems";
  std::string atk_out_keys, atk_out_truth;
  int atk_setting = 0;
  std::vector<int> atk_insert, atk_substitute, atk_delete;
  int atk_filler_len = 0;
  int atk_prompt_len = 10;
  std::uint64_t atk_seed = 0;
  attack_cmd->add_option("--setting", atk_setting, "Benchmark setting 1..4")
      ->check(CLI::Range(1, 4));
  attack_cmd->add_option("--text", atk_text, "Input text JSON (edit mode)");
  attack_cmd->add_option("--model", atk_model, "Model JSON (filler source)");
  attack_cmd->add_option("--scheme", atk_scheme, "Key scheme for --setting")
      ->check(CLI::IsMember({"its", "ems"}));
  attack_cmd->add_option("--insert", atk_insert, "Insert plain filler before POS")
      ->expected(1);
  attack_cmd->add_option("--filler-len", atk_filler_len, "Filler length for --insert");
  attack_cmd->add_option("--substitute", atk_substitute, "Substitute tokens LO HI")
      ->expected(2);
  attack_cmd->add_option("--delete", atk_delete, "Delete tokens LO HI")->expected(2);
  attack_cmd->add_option("--prompt-len", atk_prompt_len, "Prompt length for --setting");
  attack_cmd->add_option("--seed", atk_seed, "Random seed");
  attack_cmd->add_option("--out", atk_out, "Output text JSON")->required();
  attack_cmd->add_option("--out-keys", atk_out_keys, "Keys JSON output (--setting)");
  attack_cmd->add_option("--out-truth", atk_out_truth, "Ground truth JSON (--setting)");
  attack_cmd->callback([&] {
    print_resolved("attack", json{{"setting", atk_setting},
                                  {"text", atk_text},
                                  {"model", atk_model},
                                  {"scheme", atk_scheme},
                                  {"insert", atk_insert},
                                  {"filler_len", atk_filler_len},
                                  {"substitute", atk_substitute},
                                  {"delete", atk_delete},
                                  {"prompt_len", atk_prompt_len},
                                  {"seed", atk_seed},
                                  {"out", atk_out}});
    if (atk_setting != 0) {
      if (atk_model.empty()) {
        throw std::invalid_argument("--setting requires --model");
      }
      const TokenModel model = model_from_json(read_json_file(atk_model));
      const SettingData data = build_setting(
          atk_setting, model, scheme_from_string(atk_scheme), atk_seed, atk_prompt_len);
      write_json_file(atk_out, text_to_json(data.text, model.vocab_size));
      if (!atk_out_keys.empty()) write_json_file(atk_out_keys, keys_to_json(data.keys));
      if (!atk_out_truth.empty()) write_json_file(atk_out_truth, truth_to_json(data.truth));
      return;
    }
    if (atk_text.empty()) {
      throw std::invalid_argument("edit mode requires --text");
    }
    int vocab = 0;
    const TokenSequence text = text_from_json(read_json_file(atk_text), &vocab);
    TokenSequence edited;
    if (!atk_insert.empty()) {
      if (atk_model.empty()) throw std::invalid_argument("--insert requires --model");
      const TokenModel model = model_from_json(read_json_file(atk_model));
      const int pos = atk_insert[0];
      TokenSequence context;
      context.tokens.assign(text.tokens.begin(), text.tokens.begin() + (pos - 1));
      const TokenSequence filler = sample_plain(model, context, atk_filler_len, atk_seed);
      edited = attack_insert(text, pos, filler);
      vocab = model.vocab_size;
    } else if (!atk_substitute.empty()) {
      if (atk_model.empty()) throw std::invalid_argument("--substitute requires --model");
      const TokenModel model = model_from_json(read_json_file(atk_model));
      const int lo = atk_substitute[0];
      const int hi = atk_substitute[1];
      TokenSequence context;
      context.tokens.assign(text.tokens.begin(), text.tokens.begin() + (lo - 1));
      const TokenSequence filler = sample_plain(model, context, hi - lo + 1, atk_seed);
      edited = attack_substitute(text, lo, hi, filler);
      vocab = model.vocab_size;
    } else if (!atk_delete.empty()) {
      edited = attack_delete(text, atk_delete[0], atk_delete[1]);
    } else {
      throw std::invalid_argument("choose one of --setting/--insert/--substitute/--delete");
    }
    write_json_file(atk_out, text_to_json(edited, vocab));
  });

  // ---- pvalues --------------------------------------------------------
  auto* pv_cmd = app.add_subcommand("pvalues", "Sliding-window randomization p-values");
  std::string pv_keys, pv_text, pv_out;
  PipelineFlags pv_flags;
  pv_cmd->add_option("--keys", pv_keys, "Keys JSON")->required();
  pv_cmd->add_option("--text", pv_text, "Text JSON")->required();
  add_pipeline_flags(pv_cmd, pv_flags);
  pv_cmd->add_option("--out", pv_out, "Output CSV (index,p)")->required();
  pv_cmd->callback([&] {
    const KeySequence keys = keys_from_json(read_json_file(pv_keys));
    const TokenSequence text = text_from_json(read_json_file(pv_text));
    TestConfig config;
    config.window_B = pv_flags.auto_window_flag ? auto_window(text.size()) : pv_flags.window_B;
    config.replicates_T = effective_T(pv_flags.replicates_T, pv_flags.quick);
    config.measure = {measure_type_from_string(pv_flags.measure), pv_flags.gamma};
    config.seed = pv_flags.seed;
    print_resolved("pvalues", json{{"keys", pv_keys},
                                   {"text", pv_text},
                                   {"measure", pv_flags.measure},
                                   {"gamma", pv_flags.gamma},
                                   {"window_B", config.window_B},
                                   {"replicates_T", config.replicates_T},
                                   {"seed", pv_flags.seed},
                                   {"jobs", pv_flags.jobs},
                                   {"out", pv_out}});
    const PValueSequence seq = window_pvalues(keys, text, config, pv_flags.jobs);
    write_file(pv_out, pvalues_to_csv(seq));
  });

  // ---- segment --------------------------------------------------------
  auto* seg_cmd = app.add_subcommand("segment", "SeedBS-NOT change point detection");
  std::string seg_in, seg_out;
  SegmentFlags seg_flags;
  seg_cmd->add_option("--pvalues", seg_in, "Input p-value CSV")->required();
  add_segment_flags(seg_cmd, seg_flags, true);
  seg_cmd->add_option("--out", seg_out, "Output segmentation JSON")->required();
  seg_cmd->callback([&] {
    const json config_json{{"pvalues", seg_in},
                           {"zeta", seg_flags.zeta},
                           {"decay_a", seg_flags.decay_a},
                           {"min_len", seg_flags.min_len},
                           {"boot_block", seg_flags.boot_block},
                           {"boot_reps", seg_flags.boot_reps},
                           {"seed", seg_flags.seed},
                           {"jobs", seg_flags.jobs},
                           {"out", seg_out}};
    print_resolved("segment", config_json);
    const PValueSequence seq = pvalues_from_csv(read_file(seg_in));
    const SegmentationResult result =
        seedbs_not(seq.pvals, to_segmentation_config(seg_flags), seg_flags.jobs);
    json out = segmentation_to_json(result);
    out["config"] = config_json;
    write_json_file(seg_out, out);
  });

  // ---- evaluate -------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("evaluate", "Rand index of two change point sets");
  std::string eval_detected, eval_truth, eval_detected_file, eval_truth_file;
  int eval_m = 0;
  eval_cmd->add_option("--detected", eval_detected, "Detected change points, JSON array");
  eval_cmd->add_option("--detected-file", eval_detected_file,
                       "Segmentation JSON holding detected change points");
  eval_cmd->add_option("--truth", eval_truth, "True change points, JSON array");
  eval_cmd->add_option("--truth-file", eval_truth_file, "Ground truth JSON");
  eval_cmd->add_option("--m", eval_m, "Sequence length");
  eval_cmd->callback([&] {
    std::vector<int> detected, truth;
    if (!eval_detected_file.empty()) {
      detected = read_json_file(eval_detected_file)
                     .at("change_points")
                     .get<std::vector<int>>();
    } else if (!eval_detected.empty()) {
      detected = json::parse(eval_detected).get<std::vector<int>>();
    } else {
      throw std::invalid_argument("need --detected or --detected-file");
    }
    int m = eval_m;
    if (!eval_truth_file.empty()) {
      const json j = read_json_file(eval_truth_file);
      truth = j.at("change_points").get<std::vector<int>>();
      if (m == 0 && j.contains("length")) m = j.at("length").get<int>();
    } else if (!eval_truth.empty()) {
      truth = json::parse(eval_truth).get<std::vector<int>>();
    } else {
      throw std::invalid_argument("need --truth or --truth-file");
    }
    if (m == 0) throw std::invalid_argument("need --m (or a truth file with length)");
    print_resolved("evaluate", json{{"detected", detected}, {"truth", truth}, {"m", m}});
    std::cout << "rand_index=" << format_double(rand_index(detected, truth, m)) << "\n";
  });

  // ---- experiment -----------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "Per-seed benchmark pipeline");
  ExperimentConfig exp;
  PipelineFlags exp_flags;
  SegmentFlags exp_seg;
  std::string exp_out, exp_csv;
  exp_cmd->add_option("--setting", exp.setting, "Benchmark setting 1..4")
      ->required()
      ->check(CLI::Range(1, 4));
  exp_cmd->add_option("--seeds", exp.n_seeds, "Number of seeds")->required();
  exp_cmd->add_option("--vocab-size", exp.vocab_size, "Vocabulary size");
  exp_cmd->add_option("--beta", exp.beta, "Dirichlet concentration");
  exp_cmd->add_option("--model-seed", exp.model_seed, "Model seed");
  exp_cmd->add_option("--prompt-len", exp.prompt_len, "Prompt length");
  add_pipeline_flags(exp_cmd, exp_flags);
  add_segment_flags(exp_cmd, exp_seg, false);
  exp_cmd->add_option("--out", exp_out, "Report JSON");
  exp_cmd->add_option("--csv", exp_csv, "Per-seed CSV");
  exp_cmd->callback([&] {
    exp.measure = {measure_type_from_string(exp_flags.measure), exp_flags.gamma};
    exp.window_B = exp_flags.window_B;
    exp.replicates_T = effective_T(exp_flags.replicates_T, exp_flags.quick);
    exp.seg = to_segmentation_config(exp_seg);
    exp.master_seed = exp_flags.seed;
    exp.jobs = exp_flags.jobs;
    print_resolved("experiment",
                   json{{"setting", exp.setting},
                        {"seeds", exp.n_seeds},
                        {"measure", exp_flags.measure},
                        {"gamma", exp_flags.gamma},
                        {"vocab_size", exp.vocab_size},
                        {"beta", exp.beta},
                        {"model_seed", exp.model_seed},
                        {"prompt_len", exp.prompt_len},
                        {"window_B", exp.window_B},
                        {"replicates_T", exp.replicates_T},
                        {"zeta", exp.seg.threshold_zeta},
                        {"decay_a", exp.seg.decay_a},
                        {"min_len", exp.seg.min_len},
                        {"boot_block", exp.seg.boot_block},
                        {"boot_reps", exp.seg.boot_reps},
                        {"master_seed", exp.master_seed},
                        {"jobs", exp.jobs},
                        {"out", exp_out},
                        {"csv", exp_csv}});
    const ExperimentReport report = run_experiment(exp);
    if (!exp_out.empty()) write_json_file(exp_out, report_to_json(report));
    if (!exp_csv.empty()) write_file(exp_csv, report_to_csv(report));
    if (!report.rows.empty()) {
      std::cout << "median_rand_index=" << format_double(report.median_rand_index())
                << " median_false_positives="
                << format_double(report.median_false_positives()) << "\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;  // data error
  }
}
