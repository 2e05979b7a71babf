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

#ifndef MASKEVAL_CONFIG_H_
#define MASKEVAL_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "maskeval/backends.h"
#include "maskeval/masking.h"
#include "maskeval/pipeline.h"

namespace maskeval {

// Backend kinds: "mock-echo", "mock-miss", "mock-hash" (pseudo-random hits at
// `mock_accuracy`), and "http".
struct BackendConfig {
  std::string kind = "mock-echo";
  std::string url;
  int timeout_ms = 30000;
  int retries = 3;  // total attempts per call
  std::size_t max_inflight = 4;
  std::size_t mock_dim = 16;
  double mock_accuracy = 0.7;
};

struct EngineConfig {
  WindowConfig window;
  BackendConfig backend;
  std::optional<std::string> weighter_path;
  std::uint64_t seed = 0;
};

// Reads a JSON config file: {"window": {...}, "backend": {...},
// "weighter_path": "...", "seed": n}. Absent keys keep their defaults.
EngineConfig LoadConfigFile(const std::filesystem::path& path);

// Applies MASKEVAL_BACKEND_URL and MASKEVAL_SEED. `getenv` is injectable for
// tests.
void ApplyEnvironment(
    EngineConfig& cfg,
    const std::function<const char*(const char*)>& getenv = nullptr);

std::unique_ptr<Backend> MakeBackend(const EngineConfig& cfg);

PipelineConfig MakePipelineConfig(const EngineConfig& cfg);

}  // namespace maskeval

#endif  // MASKEVAL_CONFIG_H_
