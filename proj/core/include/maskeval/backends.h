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

// Model capabilities used by the scorer: fill-mask prediction and
// per-token contextual embeddings. Implementations must be safe to share
// across threads.

#ifndef MASKEVAL_BACKENDS_H_
#define MASKEVAL_BACKENDS_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "maskeval/error.h"
#include "maskeval/masking.h"

namespace maskeval {

struct Prediction {
  std::string word;
};

// Row-major matrix with one `dim`-vector per input token.
struct TokenEmbeddings {
  std::size_t dim = 0;
  std::vector<double> values;

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t k) const {
    return std::span<const double>(values).subspan(k * dim, dim);
  }
};

struct StepScore {
  Side side = Side::kCandidate;
  std::size_t word_index = 0;
  int value = 0;  // 0 or 1

  friend bool operator==(const StepScore&, const StepScore&) = default;
};

// ASCII lowercase; bytes outside A-Z pass through unchanged.
std::string FoldCase(std::string_view s);
std::string_view TrimWhitespace(std::string_view s);

// 1 iff the trimmed, case-folded strings are identical.
int ExactMatch(std::string_view truth, std::string_view prediction);

class Backend {
 public:
  virtual ~Backend() = default;

  // Throws Error(kBackendUnavailable) on transport failure and
  // Error(kMalformedResponse) on protocol violations.
  virtual Prediction Predict(const MaskedSequence& seq) const = 0;

  // Embeds `candidate <sep> source`; returns candidate.size() + 1 +
  // source.size() vectors.
  virtual TokenEmbeddings Embed(std::span<const std::string> candidate,
                                std::span<const std::string> source) const = 0;
};

// Deterministic in-process backend for tests and offline runs.
//
// Embeddings hash (token string, absolute position, seed) into a unit-norm
// vector, so the same token at a different position embeds differently.
class MockBackend : public Backend {
 public:
  using Predictor = std::function<std::string(const MaskedSequence&)>;

  struct Options {
    std::size_t dim = 16;
    std::uint64_t seed = 0;
  };

  // Never equal to a real word after case folding.
  static constexpr std::string_view kMissWord = "\x1f<miss>";

  // Always returns the ground truth.
  static MockBackend Echo(Options options);
  // Never returns the ground truth.
  static MockBackend Miss(Options options);
  // Looks up (side, word_index); unknown steps miss.
  static MockBackend FromTable(
      std::map<std::pair<Side, std::size_t>, std::string> table,
      Options options);
  // Returns the truth for a pseudo-random `accuracy` fraction of steps,
  // decided by hashing (truth, side, word_index, seed).
  static MockBackend Hashed(double accuracy, Options options);
  static MockBackend WithPredictor(Predictor predictor, Options options);

  Prediction Predict(const MaskedSequence& seq) const override;
  TokenEmbeddings Embed(std::span<const std::string> candidate,
                        std::span<const std::string> source) const override;

  std::size_t dim() const { return options_.dim; }

  // The embedding row for `token` at absolute position `position`.
  std::vector<double> EmbedToken(std::string_view token,
                                 std::size_t position) const;

  // Same decision rule Hashed() uses, exposed for fixtures.
  static bool HashedHit(std::string_view truth, Side side,
                        std::size_t word_index, std::uint64_t seed,
                        double accuracy);

 private:
  MockBackend(Predictor predictor, Options options);

  std::shared_ptr<const Predictor> predictor_;
  Options options_;
};

struct HttpBackendOptions {
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  std::chrono::milliseconds timeout{30000};
  std::string predict_path = "/predict";
  std::string embed_path = "/embed";
  std::string separator_sentinel = "<sep>";
};

// JSON-over-HTTP client.
//
//   POST predict_path  {"tokens": [...], "mask_index": i}  -> {"word": "..."}
//   POST embed_path    {"tokens": [...]}                   -> {"vectors": [[...]]}
//
// Predicted words have T5-style <extra_id_N> sentinels stripped.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  Prediction Predict(const MaskedSequence& seq) const override;
  TokenEmbeddings Embed(std::span<const std::string> candidate,
                        std::span<const std::string> source) const override;

 private:
  std::string Post(const std::string& path, const std::string& body) const;

  HttpBackendOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

// Removes <extra_id_N> sentinels and surrounding whitespace.
std::string StripSentinels(std::string_view raw);

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{100};
  double multiplier = 2.0;
};

// Calls `fn`, retrying retryable maskeval::Errors with exponential backoff.
// The last error propagates once attempts are exhausted.
template <typename Fn>
auto CallWithRetry(Fn&& fn, const RetryPolicy& policy) -> decltype(fn()) {
  auto backoff = policy.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const Error& e) {
      if (!e.retryable() || attempt >= policy.attempts) throw;
    }
    if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<std::int64_t>(backoff.count() * policy.multiplier));
  }
}

}  // namespace maskeval

#endif  // MASKEVAL_BACKENDS_H_
