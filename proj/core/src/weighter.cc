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

#include "maskeval/weighter.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "maskeval/error.h"

namespace maskeval {
namespace {

std::vector<double> UniformVector(std::size_t n) {
  return std::vector<double>(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
}

// Per-word token indices must partition [0, tokens).
void CheckPartition(const std::vector<std::vector<std::size_t>>& words,
                    std::size_t tokens, const char* side) {
  std::vector<bool> seen(tokens, false);
  std::size_t count = 0;
  for (const auto& word : words) {
    if (word.empty()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  std::string(side) + " word without tokens");
    }
    for (std::size_t k : word) {
      if (k >= tokens || seen[k]) {
        throw Error(ErrorCode::kDimensionMismatch,
                    std::string(side) + " token map is not a partition");
      }
      seen[k] = true;
      ++count;
    }
  }
  if (count != tokens) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(side) + " token map leaves tokens unassigned");
  }
}

// Softmax of W . e_k over rows [first, first + count).
std::vector<double> TokenSoftmax(const std::vector<double>& w,
                                 const TokenEmbeddings& emb, std::size_t first,
                                 std::size_t count) {
  std::vector<double> v(count);
  double max_logit = -HUGE_VAL;
  for (std::size_t k = 0; k < count; ++k) {
    const auto row = emb.row(first + k);
    double logit = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) logit += w[j] * row[j];
    v[k] = logit;
    max_logit = std::max(max_logit, logit);
  }
  double total = 0.0;
  for (double& x : v) {
    x = std::exp(x - max_logit);
    total += x;
  }
  for (double& x : v) x /= total;
  return v;
}

std::vector<double> PoolWords(const std::vector<std::vector<std::size_t>>& words,
                              const std::vector<double>& token_weights) {
  std::vector<double> out(words.size(), 0.0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t k : words[i]) out[i] += token_weights[k];
  }
  return out;
}

void CheckShapes(const WeighterParams& params, const TokenEmbeddings& emb,
                 const WordTokenMap& map) {
  if (emb.dim != params.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding dim " + std::to_string(emb.dim) +
                    " != weighter dim " + std::to_string(params.dim()));
  }
  if (emb.values.size() != emb.dim * emb.size() ||
      emb.size() != map.candidate_tokens + 1 + map.source_tokens) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding rows do not match candidate + sep + source tokens");
  }
  if (map.candidate.empty() && map.source.empty()) {
    throw Error(ErrorCode::kEmptyPair, "both texts have zero words");
  }
  CheckPartition(map.candidate, map.candidate_tokens, "candidate");
  CheckPartition(map.source, map.source_tokens, "source");
}

// Candidate weight with the degenerate fallbacks for a missing side.
double EffectiveC(double c, std::size_t n, std::size_t m) {
  if (m == 0) return 1.0;
  if (n == 0) return 0.0;
  return c;
}

// Per-word scores indexed by word, validated for exact coverage.
struct ScoreTable {
  std::vector<double> x;
  std::vector<double> y;
};

ScoreTable Tabulate(std::span<const StepScore> scores, std::size_t n,
                    std::size_t m) {
  if (scores.size() != n + m) {
    throw Error(ErrorCode::kCoverageMismatch,
                "expected " + std::to_string(n + m) + " step scores, got " +
                    std::to_string(scores.size()));
  }
  ScoreTable table{std::vector<double>(n, -1.0), std::vector<double>(m, -1.0)};
  for (const StepScore& s : scores) {
    auto& side = s.side == Side::kCandidate ? table.x : table.y;
    if (s.word_index >= side.size() || side[s.word_index] >= 0.0) {
      throw Error(ErrorCode::kCoverageMismatch,
                  "step score for " + std::string(SideName(s.side)) +
                      " word " + std::to_string(s.word_index) +
                      " is out of range or duplicated");
    }
    side[s.word_index] = static_cast<double>(s.value);
  }
  return table;
}

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

// sum_i w_i s_i for weights summing to one, evaluated as a ratio so that
// all-equal scores come back exact. Equal weights reduce to a plain mean.
double WeightedMean(const std::vector<double>& w,
                    const std::vector<double>& s) {
  if (w.empty()) return 0.0;
  if (std::all_of(w.begin(), w.end(), [&](double x) { return x == w[0]; })) {
    double hits = 0.0;
    for (double x : s) hits += x;
    return hits / static_cast<double>(s.size());
  }
  double total = 0.0;
  for (double x : w) total += x;
  return total > 0.0 ? Dot(w, s) / total : 0.0;
}

}  // namespace

double Logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double WeighterParams::c() const { return Logistic(theta_c); }

WordTokenMap MakeWordTokenMap(const PairSegmentation& pair) {
  WordTokenMap map;
  for (const Word& word : pair.candidate.words) {
    map.candidate.push_back(word.subtoken_ids);
  }
  for (const Word& word : pair.source.words) {
    map.source.push_back(word.subtoken_ids);
  }
  map.candidate_tokens = pair.candidate.subtokens.size();
  map.source_tokens = pair.source.subtokens.size();
  return map;
}

WeightAssignment UniformWeights(std::size_t n, std::size_t m) {
  if (n == 0 && m == 0) {
    throw Error(ErrorCode::kEmptyPair, "both texts have zero words");
  }
  return WeightAssignment{UniformVector(n), UniformVector(m),
                          EffectiveC(0.5, n, m)};
}

WeightAssignment CandidateOnlyWeights(std::size_t n, std::size_t m) {
  if (n == 0) {
    throw Error(ErrorCode::kEmptyCandidate, "candidate has zero words");
  }
  return WeightAssignment{UniformVector(n), UniformVector(m), 1.0};
}

WeightAssignment LearnedWeights(const WeighterParams& params,
                                const TokenEmbeddings& emb,
                                const WordTokenMap& map) {
  CheckShapes(params, emb, map);
  WeightAssignment wa;
  if (!map.candidate.empty()) {
    wa.w_x = PoolWords(map.candidate,
                       TokenSoftmax(params.w, emb, 0, map.candidate_tokens));
  }
  if (!map.source.empty()) {
    wa.w_y = PoolWords(map.source,
                       TokenSoftmax(params.w, emb, map.candidate_tokens + 1,
                                    map.source_tokens));
  }
  wa.c = EffectiveC(params.c(), map.candidate.size(), map.source.size());
  return wa;
}

double Aggregate(std::span<const StepScore> scores,
                 const WeightAssignment& wa) {
  const ScoreTable table = Tabulate(scores, wa.w_x.size(), wa.w_y.size());
  const double a = WeightedMean(wa.w_x, table.x);
  const double b = WeightedMean(wa.w_y, table.y);
  if (wa.w_y.empty() || a == b) return a;
  if (wa.w_x.empty()) return b;
  return std::clamp(wa.c * a + (1.0 - wa.c) * b, 0.0, 1.0);
}

double Loss(const WeighterParams& params, const TrainingExample& ex) {
  return LossAndGrad(params, ex, nullptr);
}

Gradient GradLoss(const WeighterParams& params, const TrainingExample& ex) {
  Gradient grad;
  LossAndGrad(params, ex, &grad);
  return grad;
}

double LossAndGrad(const WeighterParams& params, const TrainingExample& ex,
                   Gradient* grad) {
  const WordTokenMap& map = ex.word_tokens;
  CheckShapes(params, ex.embeddings, map);
  const std::size_t n = map.candidate.size();
  const std::size_t m = map.source.size();
  const ScoreTable table = Tabulate(ex.step_scores, n, m);

  // Token-level view: each token carries its word's score, so a text's
  // weighted sum is sum_k v_k * t_k.
  struct TextPass {
    std::vector<double> v;
    std::vector<double> t;
    double weighted = 0.0;
    std::size_t first_row = 0;
  };
  const auto run = [&](const std::vector<std::vector<std::size_t>>& words,
                       const std::vector<double>& word_scores,
                       std::size_t first_row, std::size_t tokens) {
    TextPass pass;
    pass.first_row = first_row;
    if (words.empty()) return pass;
    pass.v = TokenSoftmax(params.w, ex.embeddings, first_row, tokens);
    pass.t.assign(tokens, 0.0);
    for (std::size_t i = 0; i < words.size(); ++i) {
      for (std::size_t k : words[i]) pass.t[k] = word_scores[i];
    }
    pass.weighted = Dot(pass.v, pass.t);
    return pass;
  };
  const TextPass cand = run(map.candidate, table.x, 0, map.candidate_tokens);
  const TextPass src =
      run(map.source, table.y, map.candidate_tokens + 1, map.source_tokens);

  const double c = EffectiveC(params.c(), n, m);
  const double score = c * cand.weighted + (1.0 - c) * src.weighted;
  const double residual = score - ex.human_score;

  if (grad != nullptr) {
    grad->w.assign(params.dim(), 0.0);
    // d(sum_k v_k t_k)/du_k = v_k (t_k - weighted); du_k/dW = e_k.
    const auto accumulate = [&](const TextPass& pass, double factor) {
      for (std::size_t k = 0; k < pass.v.size(); ++k) {
        const double coef = factor * pass.v[k] * (pass.t[k] - pass.weighted);
        if (coef == 0.0) continue;
        const auto row = ex.embeddings.row(pass.first_row + k);
        for (std::size_t j = 0; j < grad->w.size(); ++j) {
          grad->w[j] += coef * row[j];
        }
      }
    };
    accumulate(cand, 2.0 * residual * c);
    accumulate(src, 2.0 * residual * (1.0 - c));
    // c is pinned when a side is empty.
    grad->theta_c = (n > 0 && m > 0) ? 2.0 * residual *
                                           (cand.weighted - src.weighted) * c *
                                           (1.0 - c)
                                     : 0.0;
  }
  return residual * residual;
}

}  // namespace maskeval
