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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "maskeval/backends.h"
#include "maskeval/masking.h"
#include "maskeval/pipeline.h"
#include "maskeval/segmentation.h"
#include "maskeval/weighter.h"
#include "testing/synthetic.h"

namespace maskeval {
namespace {

void BM_Reconcile(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<testing::SegmentationCase> cases;
  for (int i = 0; i < 64; ++i) cases.push_back(testing::RandomSegmentationCase(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& c = cases[i++ % cases.size()];
    benchmark::DoNotOptimize(Reconcile(c.text, c.ling, c.sub));
  }
}
BENCHMARK(BM_Reconcile);

void BM_BuildMaskedSequences(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const PairSegmentation pair =
      testing::RandomPair(rng, 40, static_cast<std::size_t>(state.range(0)));
  const WindowConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(BuildMaskedSequences(pair, cfg));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(40 + state.range(0)));
}
BENCHMARK(BM_BuildMaskedSequences)->Arg(50)->Arg(400);

TrainingExample Example(std::size_t n, std::size_t m, std::size_t dim) {
  std::mt19937_64 rng(3);
  const MockBackend backend = MockBackend::Hashed(0.5, {dim, 3});
  PipelineConfig cfg;
  cfg.max_inflight = 1;
  return BuildTrainingExample(testing::RandomPair(rng, n, m), backend, 0.5,
                              cfg);
}

void BM_LearnedWeights(benchmark::State& state) {
  const TrainingExample ex = Example(30, 300, 16);
  WeighterParams params;
  params.w.assign(16, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(LearnedWeights(params, ex.embeddings, ex.word_tokens));
  }
}
BENCHMARK(BM_LearnedWeights);

void BM_LossAndGrad(benchmark::State& state) {
  const TrainingExample ex = Example(30, 300, 16);
  WeighterParams params;
  params.w.assign(16, 0.1);
  Gradient grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(LossAndGrad(params, ex, &grad));
  }
}
BENCHMARK(BM_LossAndGrad);

void BM_SelectiveScore(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const PairSegmentation pair = testing::RandomPair(rng, 30, 300);
  const MockBackend backend = MockBackend::Hashed(0.5, {16, 4});
  WeighterParams params;
  params.w.assign(16, 0.0);
  params.w[0] = 3.0;
  PipelineConfig cfg;
  cfg.max_inflight = 1;
  const double threshold = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        SelectiveScore("p", pair, backend, params, threshold, cfg));
  }
}
BENCHMARK(BM_SelectiveScore)->Arg(3)->Arg(7)->Arg(10);

void BM_Pearson(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::vector<double> x(1600), y(1600);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = normal(rng);
    y[i] = x[i] + normal(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Pearson(x, y));
}
BENCHMARK(BM_Pearson);

}  // namespace
}  // namespace maskeval

BENCHMARK_MAIN();
