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

#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "maskeval/error.h"
#include "maskeval/pipeline.h"
#include "testing/synthetic.h"

namespace maskeval {
namespace {

using testing::MakePair;
using testing::SimplePair;

PipelineConfig Serial() {
  PipelineConfig cfg;
  cfg.max_inflight = 1;
  cfg.retry.initial_backoff = std::chrono::milliseconds(0);
  return cfg;
}

// Textbook two-pass formula.
double TwoPassPearson(const std::vector<double>& x,
                      const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

WeighterParams RandomParams(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 2.0);
  WeighterParams p;
  p.w.resize(dim);
  for (double& x : p.w) x = normal(rng);
  p.theta_c = normal(rng);
  p.dimension_label = "fluency";
  return p;
}

TEST(ScorePairTest, EchoScoresOne) {
  const MockBackend echo = MockBackend::Echo({});
  std::mt19937_64 rng(3);
  for (auto scheme : {WeightingScheme::kUniform, WeightingScheme::kCandidateOnly,
                      WeightingScheme::kLearned}) {
    const WeighterParams params = RandomParams(16, 5);
    for (int t = 0; t < 10; ++t) {
      const PairSegmentation pair = testing::RandomPair(rng, 1 + t, 2 + 2 * t);
      const ScoreReport r =
          ScorePair("p", pair, echo, scheme, &params, Serial());
      ASSERT_TRUE(r.ok());
      EXPECT_EQ(*r.final_score, 1.0);
    }
  }
}

TEST(ScorePairTest, MissScoresZero) {
  const ScoreReport r =
      ScorePair("p", SimplePair("a b c", "d e"), MockBackend::Miss({}),
                WeightingScheme::kUniform, nullptr, Serial());
  EXPECT_EQ(*r.final_score, 0.0);
}

TEST(ScorePairTest, CandidateOnlyCountsHits) {
  // Two of four candidate words right; source ignored.
  const MockBackend backend = MockBackend::FromTable(
      {{{Side::kCandidate, 0}, "The"}, {{Side::kCandidate, 2}, "sat"},
       {{Side::kSource, 0}, "wrong"}},
      {});
  const ScoreReport r =
      ScorePair("p", SimplePair("the cat sat down", "a b c"), backend,
                WeightingScheme::kCandidateOnly, nullptr, Serial());
  EXPECT_EQ(*r.final_score, 0.5);
  ASSERT_EQ(r.step_scores.size(), 7u);
  EXPECT_EQ(r.step_scores[0], (StepScore{Side::kCandidate, 0, 1}));
  EXPECT_EQ(r.step_scores[1], (StepScore{Side::kCandidate, 1, 0}));
}

TEST(ScorePairTest, UniformMixesSides) {
  // a = 1/2, b = 1/3, c = 1/2.
  const MockBackend backend = MockBackend::FromTable(
      {{{Side::kCandidate, 0}, "x"}, {{Side::kSource, 2}, "r"}}, {});
  const ScoreReport r = ScorePair("p", SimplePair("x y", "p q r"), backend,
                                  WeightingScheme::kUniform, nullptr, Serial());
  EXPECT_NEAR(*r.final_score, 0.5 * 0.5 + 0.5 / 3.0, 1e-15);
}

TEST(ScorePairTest, EmptyPairThrows) {
  PairSegmentation empty;
  EXPECT_THROW(ScorePair("p", empty, MockBackend::Echo({}),
                         WeightingScheme::kUniform, nullptr, Serial()),
               Error);
}

TEST(ScorePairTest, LearnedNeedsParams) {
  EXPECT_THROW(ScorePair("p", SimplePair("a", "b"), MockBackend::Echo({}),
                         WeightingScheme::kLearned, nullptr, Serial()),
               Error);
}

TEST(ScorePairTest, BackendFailureLeavesScoreEmpty) {
  const MockBackend flaky = MockBackend::WithPredictor(
      [](const MaskedSequence& seq) -> std::string {
        if (seq.side == Side::kSource && seq.word_index == 1) {
          throw Error(ErrorCode::kBackendUnavailable, "down");
        }
        return seq.truth;
      },
      {});
  const ScoreReport r = ScorePair("p", SimplePair("a b", "c d e"), flaky,
                                  WeightingScheme::kUniform, nullptr, Serial());
  EXPECT_FALSE(r.ok());
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].code, ErrorCode::kBackendUnavailable);
  EXPECT_EQ(*r.failures[0].step, (StepRef{Side::kSource, 1}));
  EXPECT_EQ(r.step_scores.size(), 4u);
}

TEST(ScorePairTest, TransientFailureIsRetried) {
  auto calls = std::make_shared<std::atomic<int>>(0);
  const MockBackend flaky = MockBackend::WithPredictor(
      [calls](const MaskedSequence& seq) -> std::string {
        if (calls->fetch_add(1) == 0) {
          throw Error(ErrorCode::kBackendUnavailable, "once");
        }
        return seq.truth;
      },
      {});
  const ScoreReport r = ScorePair("p", SimplePair("a b", "c"), flaky,
                                  WeightingScheme::kUniform, nullptr, Serial());
  EXPECT_EQ(*r.final_score, 1.0);
  EXPECT_EQ(calls->load(), 4);
}

TEST(ScorePairTest, ConcurrencyDoesNotChangeResults) {
  std::mt19937_64 rng(8);
  const MockBackend backend = MockBackend::Hashed(0.6, {16, 1});
  const WeighterParams params = RandomParams(16, 2);
  for (int t = 0; t < 5; ++t) {
    const PairSegmentation pair = testing::RandomPair(rng, 7, 19);
    PipelineConfig wide = Serial();
    wide.max_inflight = 8;
    const ScoreReport a = ScorePair("p", pair, backend,
                                    WeightingScheme::kLearned, &params,
                                    Serial());
    const ScoreReport b =
        ScorePair("p", pair, backend, WeightingScheme::kLearned, &params, wide);
    EXPECT_EQ(a.step_scores, b.step_scores);
    EXPECT_EQ(*a.final_score, *b.final_score);
  }
}

TEST(GlobalWeightsTest, SumToOne) {
  std::mt19937_64 rng(4);
  const MockBackend backend = MockBackend::Echo({});
  for (int t = 0; t < 20; ++t) {
    const PairSegmentation pair =
        testing::RandomPair(rng, 1 + t % 6, 1 + t % 9);
    const WeighterParams params = RandomParams(16, t);
    const WeightAssignment wa = ComputeWeights(
        pair, backend, WeightingScheme::kLearned, &params, Serial());
    double total = 0.0;
    for (const GlobalWeight& g : GlobalWeights(wa)) total += g.value;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

std::vector<GlobalWeight> Weights(std::vector<double> candidate,
                                  std::vector<double> source) {
  std::vector<GlobalWeight> out;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    out.push_back({Side::kCandidate, i, candidate[i]});
  }
  for (std::size_t j = 0; j < source.size(); ++j) {
    out.push_back({Side::kSource, j, source[j]});
  }
  return out;
}

TEST(SelectStepsTest, ShortestPrefix) {
  const auto w = Weights({0.3}, {0.5, 0.2});
  EXPECT_EQ(SelectSteps(w, 0.7),
            (std::vector<StepRef>{{Side::kSource, 0}, {Side::kCandidate, 0}}));
  EXPECT_EQ(SelectSteps(w, 0.5).size(), 1u);
  EXPECT_EQ(SelectSteps(w, 0.81).size(), 3u);
  EXPECT_EQ(SelectSteps(w, 1.0).size(), 3u);
}

TEST(SelectStepsTest, KeepsAtLeastOne) {
  EXPECT_EQ(SelectSteps(Weights({0.6}, {0.4}), 0.0).size(), 1u);
}

TEST(SelectStepsTest, TiesPreferCandidateThenIndex) {
  const auto w = Weights({0.25, 0.25}, {0.25, 0.25});
  EXPECT_EQ(SelectSteps(w, 0.75),
            (std::vector<StepRef>{{Side::kCandidate, 0},
                                  {Side::kCandidate, 1},
                                  {Side::kSource, 0}}));
}

TEST(SelectStepsTest, RejectsOutOfRangeThreshold) {
  const auto w = Weights({1.0}, {});
  EXPECT_THROW(SelectSteps(w, -0.1), Error);
  EXPECT_THROW(SelectSteps(w, 1.5), Error);
  EXPECT_THROW(SelectSteps(w, std::nan("")), Error);
}

TEST(SelectStepsTest, NestedAcrossThresholds) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> c(1 + t % 5), s(1 + t % 11);
    double total = 0.0;
    for (double& x : c) total += (x = unif(rng));
    for (double& x : s) total += (x = unif(rng));
    for (double& x : c) x /= total;
    for (double& x : s) x /= total;
    const auto w = Weights(c, s);
    std::vector<StepRef> previous;
    for (int k = 0; k <= 10; ++k) {
      const auto kept = SelectSteps(w, k / 10.0);
      ASSERT_GE(kept.size(), previous.size());
      EXPECT_TRUE(std::equal(previous.begin(), previous.end(), kept.begin()));
      double mass = 0.0;
      for (const StepRef& r : kept) {
        mass += r.side == Side::kCandidate ? c[r.word_index]
                                           : s[r.word_index];
      }
      if (k > 0) EXPECT_GE(mass, k / 10.0 - 1e-12);
      previous = kept;
    }
  }
}

TEST(SelectiveScoreTest, FullThresholdMatchesLearned) {
  std::mt19937_64 rng(21);
  const MockBackend backend = MockBackend::Hashed(0.5, {16, 4});
  for (int t = 0; t < 20; ++t) {
    const WeighterParams params = RandomParams(16, 100 + t);
    const PairSegmentation pair = testing::RandomPair(rng, 2 + t % 7, 5 + t);
    const ScoreReport full = ScorePair("p", pair, backend,
                                       WeightingScheme::kLearned, &params,
                                       Serial());
    const ScoreReport sel =
        SelectiveScore("p", pair, backend, params, 1.0, Serial());
    EXPECT_EQ(*full.final_score, *sel.final_score);  // bit-exact
    EXPECT_EQ(sel.retained_steps->size(),
              pair.candidate.size() + pair.source.size());
  }
}

TEST(SelectiveScoreTest, RenormalizesRetainedMass) {
  // Two candidate words, no source: weights come from the learned softmax.
  const PairSegmentation pair = SimplePair("alpha beta", "");
  WeighterParams params;
  params.w.assign(16, 0.0);
  const MockBackend backend =
      MockBackend::FromTable({{{Side::kCandidate, 0}, "alpha"}}, {});
  // Zero W gives 1/2 per word; threshold 0.5 keeps only candidate word 0.
  const ScoreReport r =
      SelectiveScore("p", pair, backend, params, 0.5, Serial());
  ASSERT_EQ(r.retained_steps->size(), 1u);
  EXPECT_EQ(*r.final_score, 1.0);
  PipelineConfig raw = Serial();
  raw.renormalize_selective = false;
  EXPECT_EQ(*SelectiveScore("p", pair, backend, params, 0.5, raw).final_score,
            0.5);
}

TEST(PearsonTest, KnownValue) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2, 1, 4, 3, 5};
  EXPECT_NEAR(Pearson(x, y), 0.8, 1e-12);
  const std::vector<double> y2{1, 3, 2, 5, 2};
  EXPECT_NEAR(Pearson(x, y2), TwoPassPearson(x, y2), 1e-12);
}

TEST(PearsonTest, PointSixExample) {
  // sxy = 3, sxx = syy = 5.
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{2, 1, 4, 3};
  const double r = Pearson(x, y);
  EXPECT_NEAR(r, 0.6, 1e-12);
  EXPECT_NEAR(r, TwoPassPearson(x, y), 1e-12);
}

TEST(PearsonTest, AffineInvariantAndMatchesTwoPass) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(3 + t), y(3 + t);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = normal(rng);
      y[i] = 0.5 * x[i] + normal(rng);
    }
    const double r = Pearson(x, y);
    EXPECT_NEAR(r, TwoPassPearson(x, y), 1e-12);
    std::vector<double> xs(x.size()), ys(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      xs[i] = 3.0 * x[i] - 7.0;
      ys[i] = 0.25 * y[i] + 100.0;
    }
    EXPECT_NEAR(Pearson(xs, ys), r, 1e-12);
    for (std::size_t i = 0; i < x.size(); ++i) xs[i] = -2.0 * x[i];
    EXPECT_NEAR(Pearson(xs, y), -r, 1e-12);
  }
}

TEST(PearsonTest, InsufficientData) {
  const std::vector<double> one{1.0};
  const std::vector<double> flat{2.0, 2.0, 2.0};
  const std::vector<double> x{1.0, 2.0, 3.0};
  for (auto [a, b] : {std::pair{one, one}, std::pair{x, flat}}) {
    try {
      Pearson(a, b);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
    }
  }
}

std::vector<EvalRecord> LabelledRecords(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(1.0, 5.0);
  std::vector<EvalRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(testing::MakeRecord(
        "r" + std::to_string(i), testing::RandomWords(rng, 3 + i % 4),
        testing::RandomWords(rng, 5 + i % 6), {{"fluency", unif(rng)}},
        {1.0, 5.0}));
  }
  return out;
}

TEST(EvaluateCorrelationTest, PermutationInvariant) {
  auto records = LabelledRecords(40, 5);
  const MockBackend backend = MockBackend::Hashed(0.5, {16, 0});
  const auto a = EvaluateCorrelation(records, backend,
                                     WeightingScheme::kUniform, nullptr,
                                     "fluency", Serial());
  std::mt19937_64 rng(1);
  std::shuffle(records.begin(), records.end(), rng);
  const auto b = EvaluateCorrelation(records, backend,
                                     WeightingScheme::kUniform, nullptr,
                                     "fluency", Serial());
  EXPECT_NEAR(a.pearson_r, b.pearson_r, 1e-12);
  EXPECT_EQ(a.n_pairs, 40u);
  EXPECT_EQ(a.n_failed, 0u);
}

TEST(EvaluateCorrelationTest, SkipsUnlabelledAndCountsFailures) {
  auto records = LabelledRecords(6, 9);
  records[0].human_scores.clear();
  const MockBackend backend = MockBackend::WithPredictor(
      [](const MaskedSequence& seq) -> std::string {
        if (seq.truth == "zzz") throw Error(ErrorCode::kMalformedResponse, "x");
        return seq.word_index % 2 == 0 ? seq.truth : "";
      },
      {});
  records[1] = testing::MakeRecord("bad", {{"zzz"}}, {{"a"}},
                                   {{"fluency", 3.0}}, {1.0, 5.0});
  const auto report = EvaluateCorrelation(records, backend,
                                          WeightingScheme::kUniform, nullptr,
                                          "fluency", Serial());
  EXPECT_EQ(report.n_pairs, 4u);
  EXPECT_EQ(report.n_failed, 1u);
}

TEST(PosWeightDistributionTest, UniformNounsGetHalf) {
  const PairSegmentation pair = SimplePair("dogs bark", "the dogs bark loud");
  const ScoreReport r = ScorePair("p", pair, MockBackend::Echo({}),
                                  WeightingScheme::kUniform, nullptr, Serial());
  const PosTags tags{{"NOUN", "VERB"}, {"DET", "NOUN", "VERB", "ADV"}};
  const std::vector<ScoreReport> reports{r};
  const std::vector<PosTags> all_tags{tags};
  const PosDistribution dist = PosWeightDistribution(reports, all_tags);
  EXPECT_DOUBLE_EQ(dist.candidate.at("NOUN"), 0.25);
  EXPECT_DOUBLE_EQ(dist.source.at("NOUN"), 0.125);
  EXPECT_EQ(dist.n_pairs, 1u);
}

TEST(PosWeightDistributionTest, MatchesBruteForce) {
  std::mt19937_64 rng(44);
  const std::vector<std::string> tagset{"NOUN", "VERB", "ADJ", "DET"};
  const MockBackend backend = MockBackend::Echo({});
  std::vector<ScoreReport> reports;
  std::vector<PosTags> tags;
  for (int t = 0; t < 15; ++t) {
    const PairSegmentation pair = testing::RandomPair(rng, 2 + t % 4, 3 + t % 5);
    const WeighterParams params = RandomParams(16, 900 + t);
    reports.push_back(ScorePair("p", pair, backend, WeightingScheme::kLearned,
                                &params, Serial()));
    PosTags pt;
    for (std::size_t i = 0; i < pair.candidate.size(); ++i) {
      pt.candidate.push_back(tagset[rng() % tagset.size()]);
    }
    for (std::size_t j = 0; j < pair.source.size(); ++j) {
      pt.source.push_back(tagset[rng() % tagset.size()]);
    }
    tags.push_back(pt);
  }
  const PosDistribution dist = PosWeightDistribution(reports, tags);
  for (const std::string& tag : tagset) {
    double cand = 0.0, src = 0.0;
    for (std::size_t p = 0; p < reports.size(); ++p) {
      const WeightAssignment& wa = reports[p].weights;
      for (std::size_t i = 0; i < wa.w_x.size(); ++i) {
        if (tags[p].candidate[i] == tag) cand += wa.c * wa.w_x[i];
      }
      for (std::size_t j = 0; j < wa.w_y.size(); ++j) {
        if (tags[p].source[j] == tag) src += (1.0 - wa.c) * wa.w_y[j];
      }
    }
    const double n = static_cast<double>(reports.size());
    EXPECT_NEAR(dist.candidate.count(tag) ? dist.candidate.at(tag) : 0.0,
                cand / n, 1e-12);
    EXPECT_NEAR(dist.source.count(tag) ? dist.source.at(tag) : 0.0, src / n,
                1e-12);
  }
}

TEST(PosWeightDistributionTest, AlignmentMismatch) {
  const ScoreReport r =
      ScorePair("p", SimplePair("a b", "c"), MockBackend::Echo({}),
                WeightingScheme::kUniform, nullptr, Serial());
  const std::vector<ScoreReport> reports{r};
  const std::vector<PosTags> tags{PosTags{{"NOUN"}, {"VERB"}}};
  try {
    PosWeightDistribution(reports, tags);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlignmentMismatch);
  }
}

TEST(SparsitySweepTest, FullThresholdEqualsLearnedCorrelation) {
  const auto records = LabelledRecords(30, 13);
  const MockBackend backend = MockBackend::Hashed(0.5, {16, 2});
  const WeighterParams params = RandomParams(16, 3);
  const std::vector<double> thresholds{0.3, 1.0};
  const auto points = SparsitySweep(records, backend, params, thresholds,
                                    Serial());
  ASSERT_EQ(points.size(), 2u);
  const auto full = EvaluateCorrelation(records, backend,
                                        WeightingScheme::kLearned, &params,
                                        "fluency", Serial());
  EXPECT_EQ(points[1].pearson_r, full.pearson_r);
  EXPECT_EQ(points[1].retained_fraction_mean, 1.0);
  EXPECT_LT(points[0].retained_mean, points[1].retained_mean);
}

}  // namespace
}  // namespace maskeval
