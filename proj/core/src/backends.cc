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

#include <cmath>
#include <cstdint>
#include <string>

#include "maskeval/backends.h"

namespace maskeval {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t Fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset) {
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from the top 53 bits.
double ToUnit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

bool IsSpace(char ch) {
  return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' ||
         ch == '\v';
}

}  // namespace

std::string FoldCase(std::string_view s) {
  std::string out(s);
  for (char& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

std::string_view TrimWhitespace(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

int ExactMatch(std::string_view truth, std::string_view prediction) {
  return FoldCase(TrimWhitespace(truth)) == FoldCase(TrimWhitespace(prediction))
             ? 1
             : 0;
}

MockBackend::MockBackend(Predictor predictor, Options options)
    : predictor_(std::make_shared<const Predictor>(std::move(predictor))),
      options_(options) {
  if (options_.dim == 0) {
    throw Error(ErrorCode::kInvalidArgument, "mock embedding dim must be > 0");
  }
}

MockBackend MockBackend::Echo(Options options) {
  return MockBackend([](const MaskedSequence& seq) { return seq.truth; },
                     options);
}

MockBackend MockBackend::Miss(Options options) {
  return MockBackend(
      [](const MaskedSequence&) { return std::string(kMissWord); }, options);
}

MockBackend MockBackend::FromTable(
    std::map<std::pair<Side, std::size_t>, std::string> table,
    Options options) {
  return MockBackend(
      [table = std::move(table)](const MaskedSequence& seq) {
        auto it = table.find({seq.side, seq.word_index});
        return it == table.end() ? std::string(kMissWord) : it->second;
      },
      options);
}

MockBackend MockBackend::Hashed(double accuracy, Options options) {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "accuracy must be in [0, 1]");
  }
  const std::uint64_t seed = options.seed;
  return MockBackend(
      [seed, accuracy](const MaskedSequence& seq) {
        return HashedHit(seq.truth, seq.side, seq.word_index, seed, accuracy)
                   ? seq.truth
                   : std::string(kMissWord);
      },
      options);
}

MockBackend MockBackend::WithPredictor(Predictor predictor, Options options) {
  return MockBackend(std::move(predictor), options);
}

bool MockBackend::HashedHit(std::string_view truth, Side side,
                            std::size_t word_index, std::uint64_t seed,
                            double accuracy) {
  std::uint64_t h = Fnv1a(FoldCase(truth));
  h = SplitMix64(h ^ SplitMix64(seed));
  h = SplitMix64(h ^ (static_cast<std::uint64_t>(word_index) << 1) ^
                 (side == Side::kSource ? 1U : 0U));
  return ToUnit(h) < accuracy;
}

Prediction MockBackend::Predict(const MaskedSequence& seq) const {
  return Prediction{(*predictor_)(seq)};
}

std::vector<double> MockBackend::EmbedToken(std::string_view token,
                                            std::size_t position) const {
  const std::uint64_t base =
      SplitMix64(Fnv1a(token) ^ SplitMix64(options_.seed) ^
                 SplitMix64(0x5bd1e995ULL + position));
  std::vector<double> v(options_.dim);
  double norm2 = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = 2.0 * ToUnit(SplitMix64(base + j)) - 1.0;
    norm2 += v[j] * v[j];
  }
  const double scale = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
  for (double& x : v) x *= scale;
  return v;
}

TokenEmbeddings MockBackend::Embed(std::span<const std::string> candidate,
                                   std::span<const std::string> source) const {
  if (candidate.empty() && source.empty()) {
    throw Error(ErrorCode::kEmptyPair, "nothing to embed");
  }
  TokenEmbeddings out;
  out.dim = options_.dim;
  out.values.reserve((candidate.size() + 1 + source.size()) * out.dim);
  std::size_t position = 0;
  const auto push = [&](std::string_view token) {
    const std::vector<double> v = EmbedToken(token, position++);
    out.values.insert(out.values.end(), v.begin(), v.end());
  };
  for (const std::string& token : candidate) push(token);
  push("<sep>");
  for (const std::string& token : source) push(token);
  return out;
}

}  // namespace maskeval
