// Copyright (c) 2026 dvbias Authors
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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "dvbias/check.hpp"
#include "dvbias/decode.hpp"
#include "dvbias/fixture.hpp"
#include "dvbias/io.hpp"
#include "dvbias/labels.hpp"
#include "dvbias/score.hpp"
#include "dvbias/types.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kSeedEnvVar = "DVBIAS_SEED";

std::uint64_t default_seed() {
  const char* value = std::getenv(kSeedEnvVar);
  if (value == nullptr || *value == '\0') return 0;
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(value, &end, 10);
  if (end == nullptr || *end != '\0') {
    throw dvbias::Error(dvbias::ErrorCode::kInvalidSpec,
                        std::string(kSeedEnvVar) + "='" + value +
                            "' is not an unsigned integer");
  }
  return parsed;
}

dvbias::labels::Strategy parse_strategy(const std::string& name) {
  if (name == "none") return dvbias::labels::Strategy::kNone;
  if (name == "wr") return dvbias::labels::Strategy::kWr;
  if (name == "ta") return dvbias::labels::Strategy::kTa;
  throw dvbias::Error(dvbias::ErrorCode::kInvalidSpec,
                      "unknown strategy '" + name + "' (none|wr|ta)");
}

std::string format_rate(double rate) {
  if (!std::isfinite(rate)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", rate * 100.0);
  return buf;
}

// Sorted (utterance id, path) pairs for every .dvp file in the directory.
std::vector<std::pair<std::string, std::string>> list_posterior_files(
    const std::string& post_dir) {
  if (!fs::is_directory(post_dir)) {
    throw dvbias::Error(dvbias::ErrorCode::kBadFile,
                        post_dir + ": not a directory");
  }
  std::vector<std::pair<std::string, std::string>> files;
  for (const fs::directory_entry& entry : fs::directory_iterator(post_dir)) {
    if (entry.path().extension() == ".dvp") {
      files.emplace_back(entry.path().stem().string(), entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw dvbias::Error(dvbias::ErrorCode::kBadFile,
                        post_dir + ": no .dvp files");
  }
  return files;
}

// ---------------------------------------------------------------------------
// gen-fixture

struct GenOptions {
  std::string out;
  dvbias::fixture::FixtureSpec spec;
  std::string mode = "none";
};

void run_gen_fixture(GenOptions& opts) {
  opts.spec.mode = parse_strategy(opts.mode);
  dvbias::fixture::Fixture fixture = dvbias::fixture::gen_fixture(opts.spec);
  dvbias::fixture::write_fixture(opts.out, fixture);
  std::cout << "wrote " << fixture.utterances.size() << " utterances to "
            << opts.out << "\n";
}

// ---------------------------------------------------------------------------
// make-targets

struct TargetOptions {
  std::string vocab_path;
  std::string refs_path;
  std::string bias_dir;
  std::string bias_file;
  std::string strategy = "ta";
  std::string out;
};

std::vector<std::string> bias_texts_for(const TargetOptions& opts,
                                        const std::string& utt_id) {
  if (!opts.bias_dir.empty()) {
    return dvbias::io::read_bias_texts(
        (fs::path(opts.bias_dir) / (utt_id + ".txt")).string());
  }
  return dvbias::io::read_bias_texts(opts.bias_file);
}

void run_make_targets(const TargetOptions& opts) {
  const dvbias::labels::Strategy strategy = parse_strategy(opts.strategy);
  if (strategy == dvbias::labels::Strategy::kNone) {
    throw dvbias::Error(dvbias::ErrorCode::kInvalidSpec,
                        "targets need --strategy wr or ta");
  }
  if (opts.bias_dir.empty() == opts.bias_file.empty()) {
    throw dvbias::Error(dvbias::ErrorCode::kInvalidSpec,
                        "exactly one of --bias-dir / --bias-file is required");
  }
  const dvbias::Vocabulary vocab =
      dvbias::io::read_vocabulary(opts.vocab_path);

  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& [utt_id, text] : dvbias::io::read_tsv(opts.refs_path)) {
    const dvbias::BiasList bias =
        dvbias::BiasList::from_texts(bias_texts_for(opts, utt_id), vocab);
    const std::vector<dvbias::TokenId> tokens =
        dvbias::tokenize_words(dvbias::split_words(text), vocab);
    dvbias::labels::TargetSequence target =
        strategy == dvbias::labels::Strategy::kWr
            ? dvbias::labels::build_wr_target(tokens, bias)
            : dvbias::labels::build_ta_target(tokens, bias);

    std::string ids;
    for (std::size_t i = 0; i < target.tokens.size(); ++i) {
      if (i > 0) ids += ' ';
      ids += std::to_string(target.tokens[i]);
    }
    rows.emplace_back(utt_id, opts.strategy + "\t" + ids);
  }
  dvbias::io::write_tsv(opts.out, rows);
  std::cout << "wrote " << rows.size() << " targets to " << opts.out << "\n";
}

// ---------------------------------------------------------------------------
// decode

struct DecodeOptions {
  std::string fixture_dir;
  std::string vocab_path;
  std::string post_dir;
  std::string bias_dir;
  std::string mode = "ta";
  double threshold = 0.5;
  int j_slack = 2;
  bool no_activation = false;
  std::string hyp_path;
  std::string records_path;
};

void resolve_fixture_paths(DecodeOptions& opts) {
  if (!opts.fixture_dir.empty()) {
    if (opts.vocab_path.empty()) {
      opts.vocab_path = (fs::path(opts.fixture_dir) / "vocab.txt").string();
    }
    if (opts.post_dir.empty()) {
      opts.post_dir = (fs::path(opts.fixture_dir) / "post").string();
    }
    if (opts.bias_dir.empty()) {
      opts.bias_dir = (fs::path(opts.fixture_dir) / "bias").string();
    }
  }
  if (opts.vocab_path.empty() || opts.post_dir.empty() ||
      opts.bias_dir.empty()) {
    throw dvbias::Error(
        dvbias::ErrorCode::kInvalidSpec,
        "need --fixture or all of --vocab/--post-dir/--bias-dir");
  }
}

void run_decode(DecodeOptions& opts) {
  resolve_fixture_paths(opts);
  const dvbias::decode::Mode mode = dvbias::decode::parse_mode(opts.mode);
  const dvbias::Vocabulary vocab =
      dvbias::io::read_vocabulary(opts.vocab_path);
  dvbias::decode::ActivationConfig cfg;
  cfg.threshold = opts.threshold;
  cfg.j_slack = opts.j_slack;
  cfg.activation_enabled = !opts.no_activation;
  if (cfg.threshold < 0.0 || cfg.j_slack < 0) {
    throw dvbias::Error(dvbias::ErrorCode::kInvalidSpec,
                        "threshold and j-slack must be >= 0");
  }

  std::vector<std::pair<std::string, std::string>> hyps;
  std::ofstream records;
  if (!opts.records_path.empty()) {
    records.open(opts.records_path, std::ios::binary | std::ios::trunc);
    if (!records) {
      throw dvbias::Error(dvbias::ErrorCode::kBadFile,
                          opts.records_path + ": cannot open for writing");
    }
  }

  for (const auto& [utt_id, dvp_path] : list_posterior_files(opts.post_dir)) {
    const dvbias::PosteriorMatrix m = dvbias::io::read_posteriors(dvp_path);
    const std::vector<std::string> texts = dvbias::io::read_bias_texts(
        (fs::path(opts.bias_dir) / (utt_id + ".txt")).string());
    const dvbias::BiasList bias = dvbias::BiasList::from_texts(texts, vocab);
    if (m.vocab_size() != vocab.size() || m.num_bias() != bias.size()) {
      throw dvbias::Error(
          dvbias::ErrorCode::kShapeMismatch,
          dvp_path + ": posterior is " + std::to_string(m.vocab_size()) +
              "+" + std::to_string(m.num_bias()) + " wide but vocabulary/" +
              "bias list give " + std::to_string(vocab.size()) + "+" +
              std::to_string(bias.size()));
    }

    const dvbias::decode::DecodeResult result =
        dvbias::decode::decode_utterance(m, bias, vocab, mode, cfg);
    hyps.emplace_back(utt_id, result.text);

    if (records.is_open()) {
      for (const dvbias::decode::ActivationRecord& rec : result.records) {
        json line;
        line["utterance"] = utt_id;
        line["phrase_index"] = rec.phrase;
        line["phrase"] = bias.phrase(rec.phrase).text;
        line["j"] = rec.chosen_j;
        line["window_begin"] = rec.window_begin;
        line["window_end"] = rec.window_end;
        // -inf (no feasible window) serializes as null.
        line["score"] = rec.score;
        line["applied"] = rec.applied;
        records << line.dump() << "\n";
      }
    }
  }
  dvbias::io::write_tsv(opts.hyp_path, hyps);
  std::cout << "decoded " << hyps.size() << " utterances ("
            << dvbias::decode::mode_name(mode) << ") to " << opts.hyp_path
            << "\n";
}

// ---------------------------------------------------------------------------
// score

struct ScoreOptions {
  std::string refs_path;
  std::string hyps_path;
  std::string bias_path;
  std::string unit = "word";
  std::string report_json;
  std::string report_text;
};

json report_to_json(const dvbias::score::AlignmentBreakdown& b,
                    const std::string& unit) {
  auto counts = [](const dvbias::score::ErrorCounts& c) {
    return json{{"sub", c.subs}, {"del", c.dels}, {"ins", c.ins},
                {"total", c.total()}};
  };
  json out;
  out["unit"] = unit;
  out["formatted"] = format_rate(b.wer()) + "(" + format_rate(b.uwer()) +
                     "/" + format_rate(b.bwer()) + ")";
  out["wer"] = b.wer();
  out["uwer"] = b.uwer();
  out["bwer"] = b.bwer();
  out["ref_units"] = b.ref_len();
  out["ref_biased"] = b.ref_biased;
  out["ref_unbiased"] = b.ref_unbiased;
  out["errors"] = counts(dvbias::score::ErrorCounts{
      b.biased.subs + b.unbiased.subs, b.biased.dels + b.unbiased.dels,
      b.biased.ins + b.unbiased.ins});
  out["biased_errors"] = counts(b.biased);
  out["unbiased_errors"] = counts(b.unbiased);
  return out;
}

std::string report_to_text(const dvbias::score::AlignmentBreakdown& b,
                           const std::string& unit) {
  std::string text;
  text += "WER(U-WER/B-WER): " + format_rate(b.wer()) + "(" +
          format_rate(b.uwer()) + "/" + format_rate(b.bwer()) + ")\n";
  text += "unit: " + unit + "\n";
  text += "ref units: " + std::to_string(b.ref_len()) + " (biased " +
          std::to_string(b.ref_biased) + ", unbiased " +
          std::to_string(b.ref_unbiased) + ")\n";
  auto line = [](const char* name, const dvbias::score::ErrorCounts& c) {
    return std::string(name) + ": " + std::to_string(c.total()) + " = sub " +
           std::to_string(c.subs) + " + del " + std::to_string(c.dels) +
           " + ins " + std::to_string(c.ins) + "\n";
  };
  text += line("errors",
               {b.biased.subs + b.unbiased.subs,
                b.biased.dels + b.unbiased.dels, b.biased.ins + b.unbiased.ins});
  text += line("biased errors", b.biased);
  text += line("unbiased errors", b.unbiased);
  return text;
}

dvbias::score::AlignmentBreakdown score_corpus(const ScoreOptions& opts) {
  const auto refs = dvbias::io::read_tsv(opts.refs_path);
  const auto hyp_rows = dvbias::io::read_tsv(opts.hyps_path);
  std::map<std::string, std::string> hyps(hyp_rows.begin(), hyp_rows.end());

  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>
      pairs;
  for (const auto& [utt_id, ref_text] : refs) {
    auto it = hyps.find(utt_id);
    if (it == hyps.end()) {
      throw dvbias::Error(dvbias::ErrorCode::kBadFile,
                          opts.hyps_path + ": missing hypothesis for '" +
                              utt_id + "'");
    }
    pairs.emplace_back(dvbias::split_words(ref_text),
                       dvbias::split_words(it->second));
    hyps.erase(it);
  }
  if (!hyps.empty()) {
    throw dvbias::Error(dvbias::ErrorCode::kBadFile,
                        opts.hyps_path + ": hypothesis for unknown id '" +
                            hyps.begin()->first + "'");
  }

  std::vector<std::vector<std::string>> phrases;
  for (const std::string& text :
       dvbias::io::read_bias_texts(opts.bias_path)) {
    phrases.push_back(dvbias::split_words(text));
  }
  return dvbias::score::corpus_score(pairs, phrases,
                                     dvbias::score::parse_unit(opts.unit));
}

void write_reports(const dvbias::score::AlignmentBreakdown& breakdown,
                   const ScoreOptions& opts) {
  const std::string text = report_to_text(breakdown, opts.unit);
  std::cout << text;
  if (!opts.report_text.empty()) {
    std::ofstream out(opts.report_text, std::ios::binary | std::ios::trunc);
    out << text;
  }
  if (!opts.report_json.empty()) {
    std::ofstream out(opts.report_json, std::ios::binary | std::ios::trunc);
    out << report_to_json(breakdown, opts.unit).dump(2) << "\n";
  }
}

void run_score(const ScoreOptions& opts) {
  write_reports(score_corpus(opts), opts);
}

// ---------------------------------------------------------------------------
// selfcheck

int run_selfcheck(std::uint64_t seed) {
  const std::vector<dvbias::check::SuiteResult> suites =
      dvbias::check::run_all_suites(seed);
  bool all_ok = true;
  for (const dvbias::check::SuiteResult& suite : suites) {
    std::printf("%-20s %6d cases  %3d failures  max_err %.3e  %.2fs  [%s]\n",
                suite.name.c_str(), suite.cases, suite.failures,
                suite.max_err, suite.seconds, suite.ok() ? "OK" : "FAIL");
    all_ok = all_ok && suite.ok();
  }
  return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// run (pipeline)

struct RunOptions {
  std::string config_path;
  // Flag values; empty/unset means "take the config value, then default".
  std::optional<std::string> fixture;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<double> threshold;
  std::optional<int> j_slack;
  std::optional<std::string> unit;
  bool no_activation = false;
};

int run_pipeline(const RunOptions& opts) {
  const std::map<std::string, std::string> config =
      dvbias::io::read_config(opts.config_path);
  auto pick = [&](const std::optional<std::string>& flag,
                  const char* key, const std::string& fallback) {
    if (flag.has_value()) return *flag;
    auto it = config.find(key);
    return it == config.end() ? fallback : it->second;
  };

  const std::string fixture_dir = pick(opts.fixture, "fixture", "");
  const std::string out_dir = pick(opts.out, "out", "");
  if (fixture_dir.empty() || out_dir.empty()) {
    throw dvbias::Error(dvbias::ErrorCode::kInvalidSpec,
                        "pipeline needs `fixture` and `out` (config or flag)");
  }
  const std::string mode = pick(opts.mode, "mode", "ta");
  const std::string unit = pick(opts.unit, "unit", "word");

  double threshold = 0.5;
  if (opts.threshold.has_value()) {
    threshold = *opts.threshold;
  } else if (auto it = config.find("threshold"); it != config.end()) {
    threshold = std::stod(it->second);
  }
  int j_slack = 2;
  if (opts.j_slack.has_value()) {
    j_slack = *opts.j_slack;
  } else if (auto it = config.find("j-slack"); it != config.end()) {
    j_slack = std::stoi(it->second);
  }
  bool activation = true;
  if (opts.no_activation) {
    activation = false;
  } else if (auto it = config.find("activation"); it != config.end()) {
    if (it->second != "true" && it->second != "false") {
      throw dvbias::Error(dvbias::ErrorCode::kBadFile,
                          opts.config_path + ": activation must be " +
                              "true or false, got '" + it->second + "'");
    }
    activation = it->second == "true";
  }

  fs::create_directories(out_dir);

  // Stage 1: training targets for the decode strategy (skipped for the
  // plain greedy baseline, which has no bias targets).
  if (mode == "wr" || mode == "ta") {
    TargetOptions targets;
    targets.vocab_path = (fs::path(fixture_dir) / "vocab.txt").string();
    targets.refs_path = (fs::path(fixture_dir) / "refs.tsv").string();
    targets.bias_dir = (fs::path(fixture_dir) / "bias").string();
    targets.strategy = mode;
    targets.out = (fs::path(out_dir) / "targets.tsv").string();
    run_make_targets(targets);
  }

  // Stage 2: decode.
  DecodeOptions decode;
  decode.fixture_dir = fixture_dir;
  decode.mode = mode;
  decode.threshold = threshold;
  decode.j_slack = j_slack;
  decode.no_activation = !activation;
  decode.hyp_path = (fs::path(out_dir) / "hyps.tsv").string();
  decode.records_path = (fs::path(out_dir) / "records.jsonl").string();
  run_decode(decode);

  // Stage 3: score.
  ScoreOptions score;
  score.refs_path = (fs::path(fixture_dir) / "refs.tsv").string();
  score.hyps_path = decode.hyp_path;
  score.bias_path = (fs::path(fixture_dir) / "bias_union.txt").string();
  score.unit = unit;
  score.report_json = (fs::path(out_dir) / "report.json").string();
  score.report_text = (fs::path(out_dir) / "report.txt").string();
  run_score(score);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dvbias: dynamic-vocabulary contextual biasing toolkit"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand(
      "gen-fixture", "Generate a synthetic posterior corpus");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--vocab-size", gen.spec.vocab_size,
                      "Subword inventory size (32-128)");
  gen_cmd->add_option("--utts", gen.spec.num_utterances, "Utterance count");
  gen_cmd->add_option("--frames-min", gen.spec.frames_per_token.min,
                      "Min frames per token run");
  gen_cmd->add_option("--frames-max", gen.spec.frames_per_token.max,
                      "Max frames per token run");
  gen_cmd->add_option("--alpha", gen.spec.alpha,
                      "Peak probability mass on the true label");
  gen_cmd->add_option("--rho", gen.spec.rho,
                      "Corruption rate over phrase token runs");
  gen_cmd->add_option("--bias-prob", gen.spec.bias_prob,
                      "Probability an utterance samples a bias list");
  gen_cmd->add_option("--bias-min", gen.spec.bias_min,
                      "Min sampled phrases per utterance");
  gen_cmd->add_option("--bias-max", gen.spec.bias_max,
                      "Max sampled phrases per utterance");
  gen_cmd->add_option("--distractors", gen.spec.distractors,
                      "Bias phrases absent from the audio");
  gen_cmd->add_option("--spurious-rate", gen.spec.spurious_rate,
                      "Per-distractor chance of a fake bias peak");
  gen_cmd->add_option("--mode", gen.mode,
                      "Posterior style: none, wr or ta");
  CLI::Option* gen_seed =
      gen_cmd->add_option("--seed", gen.spec.seed, "Generator seed");

  TargetOptions targets;
  CLI::App* targets_cmd = app.add_subcommand(
      "make-targets", "Build WR/TA training targets from transcripts");
  targets_cmd->add_option("--vocab", targets.vocab_path, "Vocabulary file")
      ->required();
  targets_cmd->add_option("--refs", targets.refs_path, "Reference TSV")
      ->required();
  targets_cmd->add_option("--bias-dir", targets.bias_dir,
                          "Directory of per-utterance bias lists");
  targets_cmd->add_option("--bias-file", targets.bias_file,
                          "Single bias list shared by all utterances");
  targets_cmd->add_option("--strategy", targets.strategy, "wr or ta");
  targets_cmd->add_option("--out", targets.out, "Output TSV")->required();

  DecodeOptions decode;
  CLI::App* decode_cmd =
      app.add_subcommand("decode", "Decode posterior files to hypotheses");
  decode_cmd->add_option("--fixture", decode.fixture_dir,
                         "Fixture directory (vocab.txt, post/, bias/)");
  decode_cmd->add_option("--vocab", decode.vocab_path, "Vocabulary file");
  decode_cmd->add_option("--post-dir", decode.post_dir,
                         "Directory of .dvp posterior files");
  decode_cmd->add_option("--bias-dir", decode.bias_dir,
                         "Directory of per-utterance bias lists");
  decode_cmd->add_option("--mode", decode.mode, "greedy, wr or ta");
  decode_cmd->add_option("--threshold", decode.threshold,
                         "Per-token confidence threshold");
  decode_cmd->add_option("--j-slack", decode.j_slack,
                         "Window slack around the phrase length");
  decode_cmd->add_flag("--no-activation", decode.no_activation,
                       "Replace bias tokens unconditionally");
  decode_cmd->add_option("--hyp", decode.hyp_path, "Hypothesis TSV output")
      ->required();
  decode_cmd->add_option("--records", decode.records_path,
                         "Activation-record JSONL output");

  ScoreOptions score;
  CLI::App* score_cmd =
      app.add_subcommand("score", "Score hypotheses against references");
  score_cmd->add_option("--refs", score.refs_path, "Reference TSV")
      ->required();
  score_cmd->add_option("--hyps", score.hyps_path, "Hypothesis TSV")
      ->required();
  score_cmd->add_option("--bias", score.bias_path, "Bias phrase list")
      ->required();
  score_cmd->add_option("--unit", score.unit, "word or char");
  score_cmd->add_option("--report-json", score.report_json,
                        "Write the report as JSON");
  score_cmd->add_option("--report-text", score.report_text,
                        "Write the text report to a file");

  std::uint64_t selfcheck_seed = 0;
  CLI::App* selfcheck_cmd = app.add_subcommand(
      "selfcheck", "Run the oracle and gradient suites");
  CLI::Option* selfcheck_seed_opt =
      selfcheck_cmd->add_option("--seed", selfcheck_seed, "Suite seed");

  RunOptions pipeline;
  std::string run_fixture, run_out, run_mode, run_unit;
  double run_threshold = 0.0;
  int run_j_slack = 0;
  CLI::App* run_cmd = app.add_subcommand(
      "run", "Pipeline: make-targets + decode + score from a config file");
  run_cmd->add_option("--config", pipeline.config_path,
                      "key=value pipeline config")
      ->required();
  CLI::Option* o_fixture =
      run_cmd->add_option("--fixture", run_fixture, "Fixture directory");
  CLI::Option* o_out = run_cmd->add_option("--out", run_out,
                                           "Output directory");
  CLI::Option* o_mode =
      run_cmd->add_option("--mode", run_mode, "greedy, wr or ta");
  CLI::Option* o_threshold =
      run_cmd->add_option("--threshold", run_threshold, "Confidence threshold");
  CLI::Option* o_j_slack =
      run_cmd->add_option("--j-slack", run_j_slack, "Window slack");
  CLI::Option* o_unit = run_cmd->add_option("--unit", run_unit,
                                            "word or char");
  run_cmd->add_flag("--no-activation", pipeline.no_activation,
                    "Replace bias tokens unconditionally");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      if (gen_seed->count() == 0) gen.spec.seed = default_seed();
      run_gen_fixture(gen);
      return 0;
    }
    if (targets_cmd->parsed()) {
      run_make_targets(targets);
      return 0;
    }
    if (decode_cmd->parsed()) {
      run_decode(decode);
      return 0;
    }
    if (score_cmd->parsed()) {
      run_score(score);
      return 0;
    }
    if (selfcheck_cmd->parsed()) {
      if (selfcheck_seed_opt->count() == 0) selfcheck_seed = default_seed();
      return run_selfcheck(selfcheck_seed);
    }
    if (run_cmd->parsed()) {
      if (o_fixture->count() > 0) pipeline.fixture = run_fixture;
      if (o_out->count() > 0) pipeline.out = run_out;
      if (o_mode->count() > 0) pipeline.mode = run_mode;
      if (o_threshold->count() > 0) pipeline.threshold = run_threshold;
      if (o_j_slack->count() > 0) pipeline.j_slack = run_j_slack;
      if (o_unit->count() > 0) pipeline.unit = run_unit;
      return run_pipeline(pipeline);
    }
  } catch (const dvbias::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
