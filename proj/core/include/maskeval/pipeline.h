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

// End-to-end scoring: masked predictions, exact-match step scores, weighting
// and aggregation. Also the evaluation harness (Pearson correlation against
// human judgments), selective masking, and part-of-speech weight analysis.

#ifndef MASKEVAL_PIPELINE_H_
#define MASKEVAL_PIPELINE_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maskeval/backends.h"
#include "maskeval/dataset.h"
#include "maskeval/error.h"
#include "maskeval/masking.h"
#include "maskeval/weighter.h"

namespace maskeval {

enum class WeightingScheme { kUniform, kCandidateOnly, kLearned };

std::string_view SchemeName(WeightingScheme scheme);
// "uniform", "candidate-only" or "learned".
WeightingScheme ParseScheme(std::string_view name);

struct PipelineConfig {
  WindowConfig window;
  RetryPolicy retry;
  std::size_t max_inflight = 4;
  // Selective scores divide by the retained global weight.
  bool renormalize_selective = true;
};

struct StepRef {
  Side side = Side::kCandidate;
  std::size_t word_index = 0;

  friend bool operator==(const StepRef&, const StepRef&) = default;
  friend auto operator<=>(const StepRef&, const StepRef&) = default;
};

struct StepFailure {
  std::optional<StepRef> step;  // empty for pair-level calls such as Embed
  ErrorCode code = ErrorCode::kBackendUnavailable;
  std::string message;
};

struct ScoreReport {
  std::string pair_id;
  std::optional<double> final_score;  // empty when the pair failed
  std::vector<StepScore> step_scores;
  WeightAssignment weights;
  std::optional<std::vector<StepRef>> retained_steps;
  std::vector<StepFailure> failures;

  bool ok() const { return final_score.has_value(); }
};

// c * w_x[i] on the candidate side, (1 - c) * w_y[j] on the source side.
struct GlobalWeight {
  Side side = Side::kCandidate;
  std::size_t word_index = 0;
  double value = 0.0;
};

std::vector<GlobalWeight> GlobalWeights(const WeightAssignment& wa);

// Weights for `pair` under `scheme`. The learned scheme embeds the pair
// through `backend` and needs `params`.
WeightAssignment ComputeWeights(const PairSegmentation& pair,
                                const Backend& backend, WeightingScheme scheme,
                                const WeighterParams* params,
                                const PipelineConfig& cfg);

// Throws kEmptyPair for a pair without words. Backend failures do not throw;
// they leave final_score empty and are listed in `failures`.
ScoreReport ScorePair(const std::string& pair_id, const PairSegmentation& pair,
                      const Backend& backend, WeightingScheme scheme,
                      const WeighterParams* params, const PipelineConfig& cfg);

// Steps ordered by descending global weight (candidate side first, then
// ascending word index on ties), cut at the shortest prefix whose weight
// reaches `threshold`. At least one step is always kept; threshold >= 1
// keeps every step.
std::vector<StepRef> SelectSteps(std::span<const GlobalWeight> weights,
                                 double threshold);

// Weights first, then predictions for the retained steps only.
ScoreReport SelectiveScore(const std::string& pair_id,
                           const PairSegmentation& pair,
                           const Backend& backend, const WeighterParams& params,
                           double threshold, const PipelineConfig& cfg);

// Pearson product-moment correlation. Throws kInsufficientData for fewer
// than two points or zero variance.
double Pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationReport {
  std::string dimension_label;
  double pearson_r = 0.0;
  std::size_t n_pairs = 0;
  std::size_t n_failed = 0;
};

// Scores the records that carry a human score for `dimension`; failed pairs
// are excluded and counted. `threshold` switches to selective scoring.
CorrelationReport EvaluateCorrelation(std::span<const EvalRecord> records,
                                      const Backend& backend,
                                      WeightingScheme scheme,
                                      const WeighterParams* params,
                                      const std::string& dimension,
                                      const PipelineConfig& cfg,
                                      std::optional<double> threshold = {});

// Correlation over already computed reports, paired by position with the
// human scores.
CorrelationReport CorrelateReports(std::span<const ScoreReport> reports,
                                   std::span<const double> human_scores,
                                   const std::string& dimension);

struct SparsityPoint {
  std::string dimension_label;
  double threshold = 0.0;
  double retained_mean = 0.0;           // mean retained steps per pair
  double retained_fraction_mean = 0.0;  // mean of retained / (N + M)
  std::size_t n_pairs = 0;
  double pearson_r = 0.0;
};

std::vector<SparsityPoint> SparsitySweep(std::span<const EvalRecord> records,
                                         const Backend& backend,
                                         const WeighterParams& params,
                                         std::span<const double> thresholds,
                                         const PipelineConfig& cfg);

struct PosDistribution {
  std::map<std::string, double> candidate;
  std::map<std::string, double> source;
  std::size_t n_pairs = 0;
};

// For each tag, the summed global weight of the words carrying it, averaged
// over all pairs (a pair without the tag contributes zero). Throws
// kAlignmentMismatch when tags do not line up with the reported weights.
PosDistribution PosWeightDistribution(std::span<const ScoreReport> reports,
                                      std::span<const PosTags> tags);

// Predictions and embeddings for one labelled pair. Throws the first backend
// failure after retries.
TrainingExample BuildTrainingExample(const PairSegmentation& pair,
                                     const Backend& backend, double human_score,
                                     const PipelineConfig& cfg);

}  // namespace maskeval

#endif  // MASKEVAL_PIPELINE_H_
