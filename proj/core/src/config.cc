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

#include "maskeval/config.h"

#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "maskeval/error.h"

namespace maskeval {

using nlohmann::json;

EngineConfig LoadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  EngineConfig cfg;
  try {
    const json doc = json::parse(in);
    if (doc.contains("window")) {
      const json& w = doc["window"];
      cfg.window.window_radius = w.value("window_radius", cfg.window.window_radius);
      cfg.window.max_sequence_length =
          w.value("max_sequence_length", cfg.window.max_sequence_length);
      cfg.window.mask_sentinel = w.value("mask_sentinel", cfg.window.mask_sentinel);
      cfg.window.separator_sentinel =
          w.value("separator_sentinel", cfg.window.separator_sentinel);
      if (w.contains("other_truncation")) {
        const auto mode = w["other_truncation"].get<std::string>();
        if (mode == "head") {
          cfg.window.other_truncation = Truncation::kKeepHead;
        } else if (mode == "tail") {
          cfg.window.other_truncation = Truncation::kKeepTail;
        } else {
          throw Error(ErrorCode::kValidationError,
                      "other_truncation must be 'head' or 'tail'");
        }
      }
      cfg.window.keep_separator_when_dropped = w.value(
          "keep_separator_when_dropped", cfg.window.keep_separator_when_dropped);
    }
    if (doc.contains("backend")) {
      const json& b = doc["backend"];
      cfg.backend.kind = b.value("kind", cfg.backend.kind);
      cfg.backend.url = b.value("url", cfg.backend.url);
      cfg.backend.timeout_ms = b.value("timeout_ms", cfg.backend.timeout_ms);
      cfg.backend.retries = b.value("retries", cfg.backend.retries);
      cfg.backend.max_inflight = b.value("max_inflight", cfg.backend.max_inflight);
      cfg.backend.mock_dim = b.value("mock_dim", cfg.backend.mock_dim);
      cfg.backend.mock_accuracy = b.value("mock_accuracy", cfg.backend.mock_accuracy);
    }
    if (doc.contains("weighter_path")) {
      cfg.weighter_path = doc["weighter_path"].get<std::string>();
    }
    cfg.seed = doc.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidationError,
                path.string() + ": " + std::string(e.what()));
  }
  cfg.window.Validate();
  return cfg;
}

void ApplyEnvironment(EngineConfig& cfg,
                      const std::function<const char*(const char*)>& getenv) {
  const auto lookup = [&](const char* name) -> const char* {
    return getenv ? getenv(name) : std::getenv(name);
  };
  if (const char* url = lookup("MASKEVAL_BACKEND_URL"); url && *url) {
    cfg.backend.url = url;
  }
  if (const char* seed = lookup("MASKEVAL_SEED"); seed && *seed) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(seed, &end, 10);
    if (end == seed || *end != '\0') {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("MASKEVAL_SEED is not an integer: ") + seed);
    }
    cfg.seed = value;
  }
}

std::unique_ptr<Backend> MakeBackend(const EngineConfig& cfg) {
  const BackendConfig& b = cfg.backend;
  const MockBackend::Options mock{b.mock_dim, cfg.seed};
  if (b.kind == "mock-echo") {
    return std::make_unique<MockBackend>(MockBackend::Echo(mock));
  }
  if (b.kind == "mock-miss") {
    return std::make_unique<MockBackend>(MockBackend::Miss(mock));
  }
  if (b.kind == "mock-hash") {
    return std::make_unique<MockBackend>(
        MockBackend::Hashed(b.mock_accuracy, mock));
  }
  if (b.kind == "http") {
    if (b.url.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "http backend needs a url (--backend-url or "
                  "MASKEVAL_BACKEND_URL)");
    }
    return std::make_unique<HttpBackend>(HttpBackendOptions{
        b.url, std::chrono::milliseconds(b.timeout_ms), "/predict", "/embed",
        cfg.window.separator_sentinel});
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown backend '" + b.kind + "'");
}

PipelineConfig MakePipelineConfig(const EngineConfig& cfg) {
  PipelineConfig out;
  out.window = cfg.window;
  out.retry.attempts = cfg.backend.retries;
  out.max_inflight = cfg.backend.max_inflight;
  return out;
}

}  // namespace maskeval
