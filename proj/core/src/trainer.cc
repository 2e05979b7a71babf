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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "maskeval/error.h"
#include "maskeval/weighter.h"

namespace maskeval {
namespace {

// Adam state over the flattened parameter vector [w..., theta_c].
class AdamState {
 public:
  AdamState(std::size_t size, const TrainConfig& cfg)
      : cfg_(cfg), m_(size, 0.0), v_(size, 0.0) {}

  void Step(WeighterParams& params, const Gradient& grad) {
    ++t_;
    const double bias1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bias2 = 1.0 - std::pow(cfg_.beta2, t_);
    const auto update = [&](std::size_t i, double g, double& p) {
      m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
      v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g * g;
      p -= cfg_.lr * (m_[i] / bias1) / (std::sqrt(v_[i] / bias2) + cfg_.epsilon);
    };
    for (std::size_t j = 0; j < params.w.size(); ++j) {
      update(j, grad.w[j], params.w[j]);
    }
    update(params.w.size(), grad.theta_c, params.theta_c);
  }

 private:
  const TrainConfig& cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  int t_ = 0;
};

}  // namespace

WeighterParams InitialParams(std::size_t dim, std::uint64_t seed,
                             std::string dimension_label) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0,
                                          1.0 / std::sqrt(static_cast<double>(dim)));
  WeighterParams params;
  params.w.resize(dim);
  for (double& x : params.w) x = normal(rng);
  params.theta_c = 0.0;
  params.dimension_label = std::move(dimension_label);
  return params;
}

double MeanLoss(const WeighterParams& params,
                std::span<const TrainingExample> examples) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const TrainingExample& ex : examples) total += Loss(params, ex);
  return total / static_cast<double>(examples.size());
}

WeighterParams TrainWeighter(std::span<const TrainingExample> dataset,
                             const TrainConfig& cfg, TrainingHistory* history) {
  if (dataset.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no training examples");
  }
  if (cfg.epochs < 0 || !(cfg.lr > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epochs >= 0 and lr > 0 required");
  }
  const auto holdout = static_cast<std::size_t>(
      std::llround(cfg.holdout_fraction * static_cast<double>(dataset.size())));
  if (holdout == 0 || holdout >= dataset.size()) {
    throw Error(ErrorCode::kDegenerateSplit,
                "held-out split of " + std::to_string(holdout) + " out of " +
                    std::to_string(dataset.size()) + " examples");
  }
  const std::size_t dim = dataset.front().embeddings.dim;
  for (const TrainingExample& ex : dataset) {
    if (ex.embeddings.dim != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "training examples have mixed embedding dims");
    }
  }

  std::mt19937_64 rng(cfg.seed);
  WeighterParams params = InitialParams(dim, rng(), cfg.dimension_label);

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<TrainingExample> validation;
  validation.reserve(holdout);
  for (std::size_t i = 0; i < holdout; ++i) {
    validation.push_back(dataset[order[i]]);
  }
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(holdout),
                                 order.end());

  WeighterParams best = params;
  double best_loss = MeanLoss(params, validation);
  int best_epoch = 0;
  if (history != nullptr) history->val_loss = {best_loss};

  AdamState adam(dim + 1, cfg);
  Gradient grad;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    for (std::size_t idx : train) {
      LossAndGrad(params, dataset[idx], &grad);
      adam.Step(params, grad);
    }
    const double val_loss = MeanLoss(params, validation);
    if (history != nullptr) history->val_loss.push_back(val_loss);
    if (val_loss < best_loss) {
      best = params;
      best_loss = val_loss;
      best_epoch = epoch;
    }
  }

  best.training_meta =
      TrainingMeta{cfg.seed, cfg.epochs, cfg.lr, best_loss, best_epoch};
  return best;
}

}  // namespace maskeval
