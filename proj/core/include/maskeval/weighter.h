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

// Per-word weights and their aggregation into the final score:
//
//   score = c * sum_i w_x[i] * s_x[i] + (1 - c) * sum_j w_y[j] * s_y[j]
//
// with w_x and w_y each summing to one. The learned scheme derives token
// weights from a softmax over a linear projection of contextual embeddings,
// taken separately over each text, and pools them per word.

#ifndef MASKEVAL_WEIGHTER_H_
#define MASKEVAL_WEIGHTER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maskeval/backends.h"

namespace maskeval {

struct WeightAssignment {
  std::vector<double> w_x;  // candidate words
  std::vector<double> w_y;  // source words
  double c = 0.5;

  const std::vector<double>& weights(Side side) const {
    return side == Side::kCandidate ? w_x : w_y;
  }
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  double lr = 0.0;
  double val_loss = 0.0;
  int best_epoch = 0;
};

struct WeighterParams {
  std::vector<double> w;  // one entry per embedding dimension
  double theta_c = 0.0;   // c = logistic(theta_c)
  std::string dimension_label;
  std::optional<TrainingMeta> training_meta;

  std::size_t dim() const { return w.size(); }
  double c() const;
};

// Token indices of each word, relative to its own text's token list.
// Candidate token k is embedding row k; source token k is row n + 1 + k.
struct WordTokenMap {
  std::vector<std::vector<std::size_t>> candidate;
  std::vector<std::vector<std::size_t>> source;
  std::size_t candidate_tokens = 0;
  std::size_t source_tokens = 0;
};

WordTokenMap MakeWordTokenMap(const PairSegmentation& pair);

struct TrainingExample {
  TokenEmbeddings embeddings;
  WordTokenMap word_tokens;
  std::vector<StepScore> step_scores;
  double human_score = 0.0;  // in [0, 1]
};

double Logistic(double x);

// w = 1/N, 1/M and c = 1/2. A missing side gets no weights and the other
// side takes all of the mass (c = 1 or c = 0). Throws kEmptyPair if N = M = 0.
WeightAssignment UniformWeights(std::size_t n, std::size_t m);

// Uniform weights with c = 1. Throws kEmptyCandidate if N = 0.
WeightAssignment CandidateOnlyWeights(std::size_t n, std::size_t m);

// Throws kDimensionMismatch when the embedding shape, parameter size, and
// token map disagree, or when the map does not partition each text's tokens.
WeightAssignment LearnedWeights(const WeighterParams& params,
                                const TokenEmbeddings& emb,
                                const WordTokenMap& map);

// Throws kCoverageMismatch unless `scores` covers every word of `wa` exactly
// once.
double Aggregate(std::span<const StepScore> scores, const WeightAssignment& wa);

// Squared error between the learned-weight score and the human score.
double Loss(const WeighterParams& params, const TrainingExample& ex);

struct Gradient {
  std::vector<double> w;
  double theta_c = 0.0;
};

// Analytic gradient of Loss with respect to (w, theta_c).
Gradient GradLoss(const WeighterParams& params, const TrainingExample& ex);

// Loss and gradient in one pass.
double LossAndGrad(const WeighterParams& params, const TrainingExample& ex,
                   Gradient* grad);

struct TrainConfig {
  int epochs = 100;
  double lr = 1e-5;
  double holdout_fraction = 0.2;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::string dimension_label;
};

// W ~ N(0, 1/d) from `seed`, theta_c = 0.
WeighterParams InitialParams(std::size_t dim, std::uint64_t seed,
                             std::string dimension_label = {});

struct TrainingHistory {
  std::vector<double> val_loss;  // index 0 is the initial parameters
};

// Per-example Adam over a seeded shuffle of the training split. Returns the
// parameters from the epoch with the lowest mean validation loss; epoch 0
// (no updates) takes part in the selection.
//
// Throws kEmptyDataset for an empty dataset and kDegenerateSplit when the
// held-out split would be empty or take every example.
WeighterParams TrainWeighter(std::span<const TrainingExample> dataset,
                             const TrainConfig& cfg,
                             TrainingHistory* history = nullptr);

double MeanLoss(const WeighterParams& params,
                std::span<const TrainingExample> examples);

}  // namespace maskeval

#endif  // MASKEVAL_WEIGHTER_H_
