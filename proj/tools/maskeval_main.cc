// Copyright 2026 The MaskEval Authors.
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

// maskeval command-line interface.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "maskeval/config.h"
#include "maskeval/dataset.h"
#include "maskeval/error.h"
#include "maskeval/masking.h"
#include "maskeval/pipeline.h"
#include "maskeval/serialization.h"
#include "maskeval/weighter.h"

namespace {

using maskeval::Error;
using maskeval::ErrorCode;
using nlohmann::json;

// Flags shared by every subcommand. Unset optionals leave the config file and
// environment values in place.
struct CommonFlags {
  std::string config_path;
  std::string dataset;
  std::optional<std::string> backend;
  std::optional<std::string> backend_url;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_inflight;
  std::optional<int> retries;
  std::optional<int> timeout_ms;
  std::optional<std::string> weighter;
  std::string out;
};

struct Flags {
  CommonFlags common;
  std::string weights = "uniform";
  std::string dimension;
  std::optional<double> threshold;
  std::string thresholds = "0.0..1.0";
  double step = 0.1;
  std::size_t epochs = 100;
  double lr = 1e-5;
  double holdout = 0.2;
  std::size_t per_pair = 1;
  bool unnormalized = false;
};

void AddCommon(CLI::App* cmd, CommonFlags& f, bool needs_dataset = true) {
  cmd->add_option("--config", f.config_path, "JSON engine config file");
  auto* dataset = cmd->add_option("--dataset", f.dataset, "JSONL dataset");
  if (needs_dataset) dataset->required();
  cmd->add_option("--backend", f.backend,
                  "mock-echo | mock-miss | mock-hash | http");
  cmd->add_option("--backend-url", f.backend_url, "HTTP backend base URL");
  cmd->add_option("--seed", f.seed, "Seed for all randomness");
  cmd->add_option("--max-inflight", f.max_inflight,
                  "Concurrent backend calls per pair");
  cmd->add_option("--retries", f.retries, "Attempts per backend call");
  cmd->add_option("--timeout-ms", f.timeout_ms, "HTTP timeout");
  cmd->add_option("--weighter", f.weighter, "Trained weighter JSON");
  cmd->add_option("--out", f.out, "Output file (default stdout)");
}

// File, then environment, then flags.
maskeval::EngineConfig ResolveConfig(const CommonFlags& f) {
  maskeval::EngineConfig cfg;
  if (!f.config_path.empty()) cfg = maskeval::LoadConfigFile(f.config_path);
  maskeval::ApplyEnvironment(cfg);
  if (f.backend) cfg.backend.kind = *f.backend;
  if (f.backend_url) {
    cfg.backend.url = *f.backend_url;
    if (!f.backend) cfg.backend.kind = "http";
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.max_inflight) cfg.backend.max_inflight = *f.max_inflight;
  if (f.retries) cfg.backend.retries = *f.retries;
  if (f.timeout_ms) cfg.backend.timeout_ms = *f.timeout_ms;
  if (f.weighter) cfg.weighter_path = *f.weighter;
  return cfg;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(ErrorCode::kIoError, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::optional<maskeval::WeighterParams> LoadWeighter(
    const maskeval::EngineConfig& cfg) {
  if (!cfg.weighter_path) return std::nullopt;
  return maskeval::LoadWeighterParams(*cfg.weighter_path);
}

maskeval::WeightingScheme SchemeFor(
    const std::string& weights,
    const std::optional<maskeval::WeighterParams>& params) {
  const maskeval::WeightingScheme scheme = maskeval::ParseScheme(weights);
  if (scheme == maskeval::WeightingScheme::kLearned && !params) {
    throw Error(ErrorCode::kInvalidArgument,
                "--weights learned needs --weighter");
  }
  return scheme;
}

// "a..b" stepping by `step`, or a comma-separated list.
std::vector<double> ParseThresholds(const std::string& arg, double step) {
  std::vector<double> out;
  const auto number = [&](const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bad threshold '" + text + "' in '" + arg + "'");
    }
    return value;
  };
  if (const auto dots = arg.find(".."); dots != std::string::npos) {
    const double lo = number(arg.substr(0, dots));
    const double hi = number(arg.substr(dots + 2));
    if (!(step > 0.0) || lo > hi) {
      throw Error(ErrorCode::kInvalidArgument,
                  "threshold range needs lo <= hi and --step > 0");
    }
    // Snap to a 1e-9 grid so 0.1 + 2 * 0.1 prints as 0.3.
    for (std::size_t i = 0;; ++i) {
      const double t = std::round((lo + i * step) * 1e9) / 1e9;
      if (t > hi + 1e-9) break;
      out.push_back(t);
    }
  } else {
    std::stringstream in(arg);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(number(item));
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "no thresholds");
  return out;
}

int RunScore(const Flags& f) {
  const auto cfg = ResolveConfig(f.common);
  const auto records = maskeval::LoadDataset(f.common.dataset);
  const auto backend = maskeval::MakeBackend(cfg);
  auto pipeline = maskeval::MakePipelineConfig(cfg);
  pipeline.renormalize_selective = !f.unnormalized;
  const auto params = LoadWeighter(cfg);
  const auto scheme = SchemeFor(f.weights, params);
  if (f.threshold && !params) {
    throw Error(ErrorCode::kInvalidArgument, "--threshold needs --weighter");
  }
  Output out(f.common.out);
  for (const auto& record : records) {
    const auto pair = maskeval::SegmentRecord(record);
    const auto report =
        f.threshold ? maskeval::SelectiveScore(record.pair_id, pair, *backend,
                                               *params, *f.threshold, pipeline)
                    : maskeval::ScorePair(record.pair_id, pair, *backend,
                                          scheme, params ? &*params : nullptr,
                                          pipeline);
    out.stream() << maskeval::ToJson(report).dump() << '\n';
  }
  return 0;
}

int RunTrain(const Flags& f) {
  const auto cfg = ResolveConfig(f.common);
  const auto records = maskeval::LoadDataset(f.common.dataset);
  const auto backend = maskeval::MakeBackend(cfg);
  const auto pipeline = maskeval::MakePipelineConfig(cfg);
  std::vector<maskeval::TrainingExample> examples;
  for (const auto& record : records) {
    const auto human = maskeval::HumanScore(record, f.dimension);
    if (!human) continue;
    examples.push_back(maskeval::BuildTrainingExample(
        maskeval::SegmentRecord(record), *backend, *human, pipeline));
  }
  maskeval::TrainConfig train;
  train.epochs = f.epochs;
  train.lr = f.lr;
  train.holdout_fraction = f.holdout;
  train.seed = cfg.seed;
  train.dimension_label = f.dimension;
  const auto params = maskeval::TrainWeighter(examples, train);
  Output out(f.common.out);
  out.stream() << maskeval::ToJson(params).dump(2) << '\n';
  return 0;
}

int RunEvaluate(const Flags& f) {
  const auto cfg = ResolveConfig(f.common);
  const auto records = maskeval::LoadDataset(f.common.dataset);
  const auto backend = maskeval::MakeBackend(cfg);
  auto pipeline = maskeval::MakePipelineConfig(cfg);
  pipeline.renormalize_selective = !f.unnormalized;
  const auto params = LoadWeighter(cfg);
  // A weighter without explicit --weights means learned weights.
  const std::string weights =
      f.weights.empty() ? (params ? "learned" : "uniform") : f.weights;
  const auto scheme = SchemeFor(weights, params);
  if (f.threshold && !params) {
    throw Error(ErrorCode::kInvalidArgument, "--threshold needs --weighter");
  }
  const auto report = maskeval::EvaluateCorrelation(
      records, *backend, scheme, params ? &*params : nullptr, f.dimension,
      pipeline, f.threshold);
  Output out(f.common.out);
  out.stream() << maskeval::ToJson(report).dump(2) << '\n';
  return 0;
}

int RunGenMlm(const Flags& f) {
  const auto cfg = ResolveConfig(f.common);
  const auto records = maskeval::LoadDataset(f.common.dataset);
  Output out(f.common.out);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto pair = maskeval::SegmentRecord(records[i]);
    if (pair.candidate.words.empty() || pair.source.words.empty()) continue;
    for (std::size_t k = 0; k < f.per_pair; ++k) {
      // Independent stream per (pair, draw) so output does not depend on
      // which records precede it.
      std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                        static_cast<std::uint32_t>(cfg.seed >> 32),
                        static_cast<std::uint32_t>(i),
                        static_cast<std::uint32_t>(k)};
      std::uint32_t words[2];
      seq.generate(words, words + 2);
      const std::uint64_t seed =
          (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
      const auto example =
          maskeval::GenerateMlmTrainingExample(pair, seed, cfg.window);
      out.stream() << maskeval::MlmExampleToJson(example, records[i].pair_id)
                          .dump()
                   << '\n';
    }
  }
  return 0;
}

int RunAnalyzePos(const Flags& f) {
  const auto cfg = ResolveConfig(f.common);
  const auto records = maskeval::LoadDataset(f.common.dataset);
  const auto backend = maskeval::MakeBackend(cfg);
  const auto pipeline = maskeval::MakePipelineConfig(cfg);
  const auto params = LoadWeighter(cfg);
  const std::string weights =
      f.weights.empty() ? (params ? "learned" : "uniform") : f.weights;
  const auto scheme = SchemeFor(weights, params);
  std::vector<maskeval::ScoreReport> reports;
  std::vector<maskeval::PosTags> tags;
  for (const auto& record : records) {
    if (!record.pos_tags) continue;
    const auto pair = maskeval::SegmentRecord(record);
    // Weights alone are enough; predictions are not needed.
    maskeval::ScoreReport report;
    report.pair_id = record.pair_id;
    report.weights = maskeval::ComputeWeights(
        pair, *backend, scheme, params ? &*params : nullptr, pipeline);
    report.final_score = 0.0;
    reports.push_back(std::move(report));
    tags.push_back(*record.pos_tags);
  }
  const auto dist = maskeval::PosWeightDistribution(reports, tags);
  Output out(f.common.out);
  out.stream() << maskeval::ToJson(dist).dump(2) << '\n';
  return 0;
}

int RunSparsity(const Flags& f) {
  const auto cfg = ResolveConfig(f.common);
  const auto params = LoadWeighter(cfg);
  if (!params) {
    throw Error(ErrorCode::kInvalidArgument, "sparsity-sweep needs --weighter");
  }
  const auto thresholds = ParseThresholds(f.thresholds, f.step);
  const auto records = maskeval::LoadDataset(f.common.dataset);
  const auto backend = maskeval::MakeBackend(cfg);
  auto pipeline = maskeval::MakePipelineConfig(cfg);
  pipeline.renormalize_selective = !f.unnormalized;
  auto scored = *params;
  if (!f.dimension.empty()) scored.dimension_label = f.dimension;
  const auto points =
      maskeval::SparsitySweep(records, *backend, scored, thresholds, pipeline);
  Output out(f.common.out);
  maskeval::WriteSparsityCsv(out.stream(), points);
  return 0;
}

void PrintError(std::string_view code, const std::string& message,
                std::optional<std::size_t> line = std::nullopt) {
  json error = {{"code", code}, {"message", message}};
  if (line) error["line"] = *line;
  std::cerr << json{{"error", error}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Masked-prediction evaluation of generated text"};
  app.require_subcommand(1);
  Flags f;
  int (*run)(const Flags&) = nullptr;

  auto* score = app.add_subcommand("score", "Score every pair of a dataset");
  AddCommon(score, f.common);
  score->add_option("--weights", f.weights,
                    "uniform | candidate-only | learned");
  score->add_option("--threshold", f.threshold,
                    "Selective scoring with a learned weighter");
  score->add_flag("--unnormalized", f.unnormalized,
                  "Do not renormalize selective scores");
  score->callback([&] { run = RunScore; });

  auto* train = app.add_subcommand("train-weighter", "Fit a learned weighter");
  AddCommon(train, f.common);
  train->add_option("--dimension", f.dimension, "Human score label")
      ->required();
  train->add_option("--epochs", f.epochs, "Training epochs");
  train->add_option("--lr", f.lr, "Adam learning rate");
  train->add_option("--holdout", f.holdout, "Validation fraction");
  train->callback([&] { run = RunTrain; });

  auto* evaluate = app.add_subcommand(
      "evaluate", "Pearson correlation against human scores");
  AddCommon(evaluate, f.common);
  evaluate->add_option("--dimension", f.dimension, "Human score label")
      ->required();
  evaluate->add_option("--weights", f.weights,
                       "uniform | candidate-only | learned");
  evaluate->add_option("--threshold", f.threshold, "Selective scoring");
  evaluate->add_flag("--unnormalized", f.unnormalized,
                     "Do not renormalize selective scores");
  evaluate->callback([&] {
    if (evaluate->count("--weights") == 0) f.weights.clear();
    run = RunEvaluate;
  });

  auto* gen = app.add_subcommand("gen-mlm-data",
                                 "Emit masked-word fine-tuning examples");
  AddCommon(gen, f.common);
  gen->add_option("--per-pair", f.per_pair, "Examples per pair");
  gen->callback([&] { run = RunGenMlm; });

  auto* pos = app.add_subcommand("analyze-pos",
                                 "Mean global weight per part-of-speech tag");
  AddCommon(pos, f.common);
  pos->add_option("--weights", f.weights, "uniform | candidate-only | learned");
  pos->callback([&] {
    if (pos->count("--weights") == 0) f.weights.clear();
    run = RunAnalyzePos;
  });

  auto* sweep = app.add_subcommand(
      "sparsity-sweep", "Correlation and retained steps per threshold");
  AddCommon(sweep, f.common);
  sweep->add_option("--thresholds", f.thresholds, "a..b or a,b,c");
  sweep->add_option("--step", f.step, "Step for a..b ranges");
  sweep->add_option("--dimension", f.dimension,
                    "Human score label (default: the weighter's)");
  sweep->add_flag("--unnormalized", f.unnormalized,
                  "Do not renormalize selective scores");
  sweep->callback([&] { run = RunSparsity; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError("UsageError", e.what());
    return 2;
  }

  try {
    return run(f);
  } catch (const Error& e) {
    PrintError(maskeval::ErrorCodeName(e.code()), e.what(), e.line());
  } catch (const std::exception& e) {
    PrintError("InternalError", e.what());
  }
  return 1;
}
