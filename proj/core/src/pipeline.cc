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

#include "maskeval/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace maskeval {
namespace {

bool IsBackendFailure(const Error& e) {
  return e.code() == ErrorCode::kBackendUnavailable ||
         e.code() == ErrorCode::kMalformedResponse;
}

std::vector<StepRef> AllSteps(const PairSegmentation& pair) {
  std::vector<StepRef> steps;
  steps.reserve(pair.candidate.size() + pair.source.size());
  for (std::size_t i = 0; i < pair.candidate.size(); ++i) {
    steps.push_back({Side::kCandidate, i});
  }
  for (std::size_t j = 0; j < pair.source.size(); ++j) {
    steps.push_back({Side::kSource, j});
  }
  return steps;
}

struct PredictionRun {
  std::vector<StepScore> scores;  // successful steps, in input order
  std::vector<StepFailure> failures;
};

// Predicts every step with at most cfg.max_inflight concurrent backend calls.
// Results are collected by step position, so completion order is irrelevant.
PredictionRun RunPredictions(const PairSegmentation& pair,
                             std::span<const StepRef> steps,
                             const Backend& backend,
                             const PipelineConfig& cfg) {
  std::vector<std::optional<int>> values(steps.size());
  std::vector<std::optional<StepFailure>> failures(steps.size());

  const auto predict_one = [&](std::size_t i) {
    const StepRef step = steps[i];
    try {
      const MaskedSequence seq =
          BuildMaskedSequence(pair, step.side, step.word_index, cfg.window);
      const Prediction prediction = CallWithRetry(
          [&] { return backend.Predict(seq); }, cfg.retry);
      values[i] = ExactMatch(seq.truth, prediction.word);
    } catch (const Error& e) {
      failures[i] = StepFailure{step, e.code(), e.what()};
    } catch (const std::exception& e) {
      failures[i] = StepFailure{step, ErrorCode::kMalformedResponse, e.what()};
    }
  };

  const std::size_t workers =
      std::min(std::max<std::size_t>(cfg.max_inflight, 1), steps.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < steps.size(); ++i) predict_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < steps.size(); i = next++) {
          predict_one(i);
        }
      });
    }
  }

  PredictionRun run;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (values[i]) {
      run.scores.push_back({steps[i].side, steps[i].word_index, *values[i]});
    } else {
      run.failures.push_back(std::move(*failures[i]));
    }
  }
  return run;
}

void RequireWords(const PairSegmentation& pair) {
  if (pair.candidate.words.empty() && pair.source.words.empty()) {
    throw Error(ErrorCode::kEmptyPair, "both texts have zero words");
  }
}

double Clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::string_view SchemeName(WeightingScheme scheme) {
  switch (scheme) {
    case WeightingScheme::kUniform:
      return "uniform";
    case WeightingScheme::kCandidateOnly:
      return "candidate-only";
    case WeightingScheme::kLearned:
      return "learned";
  }
  return "unknown";
}

WeightingScheme ParseScheme(std::string_view name) {
  if (name == "uniform") return WeightingScheme::kUniform;
  if (name == "candidate-only") return WeightingScheme::kCandidateOnly;
  if (name == "learned") return WeightingScheme::kLearned;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown weighting scheme '" + std::string(name) + "'");
}

std::vector<GlobalWeight> GlobalWeights(const WeightAssignment& wa) {
  std::vector<GlobalWeight> out;
  out.reserve(wa.w_x.size() + wa.w_y.size());
  for (std::size_t i = 0; i < wa.w_x.size(); ++i) {
    out.push_back({Side::kCandidate, i, wa.c * wa.w_x[i]});
  }
  for (std::size_t j = 0; j < wa.w_y.size(); ++j) {
    out.push_back({Side::kSource, j, (1.0 - wa.c) * wa.w_y[j]});
  }
  return out;
}

WeightAssignment ComputeWeights(const PairSegmentation& pair,
                                const Backend& backend, WeightingScheme scheme,
                                const WeighterParams* params,
                                const PipelineConfig& cfg) {
  const std::size_t n = pair.candidate.size();
  const std::size_t m = pair.source.size();
  switch (scheme) {
    case WeightingScheme::kUniform:
      return UniformWeights(n, m);
    case WeightingScheme::kCandidateOnly:
      return CandidateOnlyWeights(n, m);
    case WeightingScheme::kLearned:
      break;
  }
  if (params == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "learned weighting requires weighter parameters");
  }
  RequireWords(pair);
  const std::vector<std::string> cand = pair.candidate.subtoken_strings();
  const std::vector<std::string> src = pair.source.subtoken_strings();
  const TokenEmbeddings emb =
      CallWithRetry([&] { return backend.Embed(cand, src); }, cfg.retry);
  return LearnedWeights(*params, emb, MakeWordTokenMap(pair));
}

ScoreReport ScorePair(const std::string& pair_id, const PairSegmentation& pair,
                      const Backend& backend, WeightingScheme scheme,
                      const WeighterParams* params, const PipelineConfig& cfg) {
  RequireWords(pair);
  cfg.window.Validate();
  ScoreReport report;
  report.pair_id = pair_id;
  try {
    report.weights = ComputeWeights(pair, backend, scheme, params, cfg);
  } catch (const Error& e) {
    if (!IsBackendFailure(e)) throw;
    report.failures.push_back({std::nullopt, e.code(), e.what()});
    return report;
  }

  const std::vector<StepRef> steps = AllSteps(pair);
  PredictionRun run = RunPredictions(pair, steps, backend, cfg);
  report.step_scores = std::move(run.scores);
  report.failures = std::move(run.failures);
  if (report.failures.empty()) {
    report.final_score = Aggregate(report.step_scores, report.weights);
  }
  return report;
}

std::vector<StepRef> SelectSteps(std::span<const GlobalWeight> weights,
                                 double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be in [0, 1]");
  }
  std::vector<GlobalWeight> sorted(weights.begin(), weights.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const GlobalWeight& a, const GlobalWeight& b) {
                     if (a.value != b.value) return a.value > b.value;
                     if (a.side != b.side) return a.side == Side::kCandidate;
                     return a.word_index < b.word_index;
                   });
  std::size_t keep = sorted.size();
  if (threshold < 1.0) {
    double mass = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      mass += sorted[i].value;
      if (mass >= threshold) {
        keep = i + 1;
        break;
      }
    }
  }
  std::vector<StepRef> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    out.push_back({sorted[i].side, sorted[i].word_index});
  }
  return out;
}

ScoreReport SelectiveScore(const std::string& pair_id,
                           const PairSegmentation& pair,
                           const Backend& backend, const WeighterParams& params,
                           double threshold, const PipelineConfig& cfg) {
  RequireWords(pair);
  cfg.window.Validate();
  ScoreReport report;
  report.pair_id = pair_id;
  try {
    report.weights =
        ComputeWeights(pair, backend, WeightingScheme::kLearned, &params, cfg);
  } catch (const Error& e) {
    if (!IsBackendFailure(e)) throw;
    report.failures.push_back({std::nullopt, e.code(), e.what()});
    return report;
  }

  const std::vector<GlobalWeight> global = GlobalWeights(report.weights);
  std::vector<StepRef> retained = SelectSteps(global, threshold);
  PredictionRun run = RunPredictions(pair, retained, backend, cfg);
  report.step_scores = std::move(run.scores);
  report.failures = std::move(run.failures);
  report.retained_steps = std::move(retained);
  if (!report.failures.empty()) return report;

  if (report.step_scores.size() == global.size()) {
    report.final_score = Aggregate(report.step_scores, report.weights);
    return report;
  }
  const std::size_t n = report.weights.w_x.size();
  double numerator = 0.0;
  double mass = 0.0;
  for (const StepScore& s : report.step_scores) {
    const double g =
        global[(s.side == Side::kCandidate ? 0 : n) + s.word_index].value;
    numerator += g * s.value;
    mass += g;
  }
  double score = numerator;
  if (cfg.renormalize_selective) score = mass > 0.0 ? numerator / mass : 0.0;
  report.final_score = Clamp01(score);
  return report;
}

double Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "Pearson inputs differ in length");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "Pearson correlation needs at least two points");
  }
  // Single-pass co-moment update.
  double mean_x = 0.0;
  double mean_y = 0.0;
  double m2_x = 0.0;
  double m2_y = 0.0;
  double co = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double count = static_cast<double>(i + 1);
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    mean_x += dx / count;
    mean_y += dy / count;
    m2_x += dx * (x[i] - mean_x);
    m2_y += dy * (y[i] - mean_y);
    co += dx * (y[i] - mean_y);
  }
  if (!(m2_x > 0.0) || !(m2_y > 0.0)) {
    throw Error(ErrorCode::kInsufficientData,
                "Pearson correlation is undefined for zero variance");
  }
  return std::clamp(co / std::sqrt(m2_x * m2_y), -1.0, 1.0);
}

CorrelationReport CorrelateReports(std::span<const ScoreReport> reports,
                                   std::span<const double> human_scores,
                                   const std::string& dimension) {
  if (reports.size() != human_scores.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "reports and human scores differ in length");
  }
  CorrelationReport out;
  out.dimension_label = dimension;
  std::vector<double> metric;
  std::vector<double> human;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (!reports[i].ok()) {
      ++out.n_failed;
      continue;
    }
    metric.push_back(*reports[i].final_score);
    human.push_back(human_scores[i]);
  }
  out.n_pairs = metric.size();
  if (out.n_pairs < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "fewer than two scored pairs for '" + dimension + "'");
  }
  out.pearson_r = Pearson(metric, human);
  return out;
}

CorrelationReport EvaluateCorrelation(std::span<const EvalRecord> records,
                                      const Backend& backend,
                                      WeightingScheme scheme,
                                      const WeighterParams* params,
                                      const std::string& dimension,
                                      const PipelineConfig& cfg,
                                      std::optional<double> threshold) {
  if (threshold && params == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "selective scoring requires weighter parameters");
  }
  std::vector<ScoreReport> reports;
  std::vector<double> human;
  for (const EvalRecord& record : records) {
    const std::optional<double> h = HumanScore(record, dimension);
    if (!h) continue;
    const PairSegmentation pair = SegmentRecord(record);
    reports.push_back(threshold ? SelectiveScore(record.pair_id, pair, backend,
                                                 *params, *threshold, cfg)
                                : ScorePair(record.pair_id, pair, backend,
                                            scheme, params, cfg));
    human.push_back(*h);
  }
  return CorrelateReports(reports, human, dimension);
}

std::vector<SparsityPoint> SparsitySweep(std::span<const EvalRecord> records,
                                         const Backend& backend,
                                         const WeighterParams& params,
                                         std::span<const double> thresholds,
                                         const PipelineConfig& cfg) {
  const std::string& dimension = params.dimension_label;
  std::vector<std::pair<const EvalRecord*, double>> labelled;
  std::vector<PairSegmentation> pairs;
  for (const EvalRecord& record : records) {
    if (const auto h = HumanScore(record, dimension)) {
      labelled.emplace_back(&record, *h);
      pairs.push_back(SegmentRecord(record));
    }
  }

  std::vector<SparsityPoint> out;
  for (double threshold : thresholds) {
    SparsityPoint point;
    point.dimension_label = dimension;
    point.threshold = threshold;
    std::vector<ScoreReport> reports;
    std::vector<double> human;
    double retained = 0.0;
    double fraction = 0.0;
    for (std::size_t i = 0; i < labelled.size(); ++i) {
      ScoreReport report = SelectiveScore(labelled[i].first->pair_id, pairs[i],
                                          backend, params, threshold, cfg);
      if (report.ok()) {
        const double kept = static_cast<double>(report.retained_steps->size());
        retained += kept;
        fraction += kept / static_cast<double>(pairs[i].candidate.size() +
                                               pairs[i].source.size());
      }
      reports.push_back(std::move(report));
      human.push_back(labelled[i].second);
    }
    try {
      const CorrelationReport corr = CorrelateReports(reports, human, dimension);
      point.n_pairs = corr.n_pairs;
      point.pearson_r = corr.pearson_r;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInsufficientData) throw;
      point.n_pairs = static_cast<std::size_t>(std::count_if(
          reports.begin(), reports.end(),
          [](const ScoreReport& r) { return r.ok(); }));
      point.pearson_r = std::nan("");
    }
    if (point.n_pairs > 0) {
      point.retained_mean = retained / static_cast<double>(point.n_pairs);
      point.retained_fraction_mean =
          fraction / static_cast<double>(point.n_pairs);
    }
    out.push_back(std::move(point));
  }
  return out;
}

PosDistribution PosWeightDistribution(std::span<const ScoreReport> reports,
                                      std::span<const PosTags> tags) {
  if (reports.size() != tags.size()) {
    throw Error(ErrorCode::kAlignmentMismatch,
                "got " + std::to_string(tags.size()) + " tag sets for " +
                    std::to_string(reports.size()) + " reports");
  }
  PosDistribution out;
  for (std::size_t p = 0; p < reports.size(); ++p) {
    const ScoreReport& report = reports[p];
    if (!report.ok()) continue;
    if (tags[p].candidate.size() != report.weights.w_x.size() ||
        tags[p].source.size() != report.weights.w_y.size()) {
      throw Error(ErrorCode::kAlignmentMismatch,
                  "tags for pair '" + report.pair_id +
                      "' do not align with its words");
    }
    for (const GlobalWeight& g : GlobalWeights(report.weights)) {
      const bool cand = g.side == Side::kCandidate;
      const std::string& tag =
          cand ? tags[p].candidate[g.word_index] : tags[p].source[g.word_index];
      (cand ? out.candidate : out.source)[tag] += g.value;
    }
    ++out.n_pairs;
  }
  if (out.n_pairs > 0) {
    const double n = static_cast<double>(out.n_pairs);
    for (auto& [tag, mass] : out.candidate) mass /= n;
    for (auto& [tag, mass] : out.source) mass /= n;
  }
  return out;
}

TrainingExample BuildTrainingExample(const PairSegmentation& pair,
                                     const Backend& backend, double human_score,
                                     const PipelineConfig& cfg) {
  RequireWords(pair);
  cfg.window.Validate();
  const std::vector<StepRef> steps = AllSteps(pair);
  PredictionRun run = RunPredictions(pair, steps, backend, cfg);
  if (!run.failures.empty()) {
    const StepFailure& first = run.failures.front();
    throw Error(first.code, first.message);
  }
  const std::vector<std::string> cand = pair.candidate.subtoken_strings();
  const std::vector<std::string> src = pair.source.subtoken_strings();
  TrainingExample ex;
  ex.embeddings =
      CallWithRetry([&] { return backend.Embed(cand, src); }, cfg.retry);
  ex.word_tokens = MakeWordTokenMap(pair);
  ex.step_scores = std::move(run.scores);
  ex.human_score = human_score;
  return ex;
}

}  // namespace maskeval
