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

// JSON and CSV encodings of the engine's outputs and of trained weighters.

#ifndef MASKEVAL_SERIALIZATION_H_
#define MASKEVAL_SERIALIZATION_H_

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "maskeval/masking.h"
#include "maskeval/pipeline.h"
#include "maskeval/weighter.h"

namespace maskeval {

inline constexpr int kWeighterFormatVersion = 1;

nlohmann::json ToJson(const ScoreReport& report);
nlohmann::json ToJson(const CorrelationReport& report);
nlohmann::json ToJson(const PosDistribution& dist);
nlohmann::json ToJson(const WeighterParams& params);

// {input_tokens, target_word, side, word_index, pair_id}
nlohmann::json MlmExampleToJson(const MaskedSequence& seq,
                                const std::string& pair_id);

// {version, dimension_label, d, W, theta_c, training_meta{...}}.
// Throws kValidationError for a malformed document.
WeighterParams WeighterParamsFromJson(const nlohmann::json& doc);

void SaveWeighterParams(const std::filesystem::path& path,
                        const WeighterParams& params);
WeighterParams LoadWeighterParams(const std::filesystem::path& path);

// Header plus one row per point:
// dimension,threshold,retained_mean,retained_fraction_mean,n_pairs,pearson_r
void WriteSparsityCsv(std::ostream& out,
                      std::span<const SparsityPoint> points);

}  // namespace maskeval

#endif  // MASKEVAL_SERIALIZATION_H_
