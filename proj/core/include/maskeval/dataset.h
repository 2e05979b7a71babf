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

#ifndef MASKEVAL_DATASET_H_
#define MASKEVAL_DATASET_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maskeval/masking.h"
#include "maskeval/segmentation.h"

namespace maskeval {

inline constexpr int kDatasetSchemaVersion = 1;

struct HumanScale {
  double min = 0.0;
  double max = 1.0;

  friend bool operator==(const HumanScale&, const HumanScale&) = default;
};

// One tag per reconciled word on each side.
struct PosTags {
  std::vector<std::string> candidate;
  std::vector<std::string> source;

  friend bool operator==(const PosTags&, const PosTags&) = default;
};

struct EvalRecord {
  std::string pair_id;
  std::string candidate_text;
  std::string source_text;
  std::vector<Span> candidate_ling_spans;
  std::vector<Span> candidate_sub_spans;
  std::vector<Span> source_ling_spans;
  std::vector<Span> source_sub_spans;
  std::map<std::string, double> human_scores;  // native scale
  HumanScale human_scale;
  std::optional<PosTags> pos_tags;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

// (raw - min) / (max - min). Throws kOutOfRange when raw lies outside the
// scale and kInvalidArgument when min >= max.
double ScaleHumanScore(double raw, const HumanScale& scale);

// Reconciles both texts. Throws segmentation errors.
PairSegmentation SegmentRecord(const EvalRecord& record);

// Scaled human score for `dimension`, if the record has one.
std::optional<double> HumanScore(const EvalRecord& record,
                                 const std::string& dimension);

// Checks every record invariant; throws Error(kValidationError) naming the
// problem.
void ValidateRecord(const EvalRecord& record);

// JSONL: a header line {"schema": 1, "human_scale": {"min": .., "max": ..}}
// followed by one record per line. Records may override human_scale.
// An empty file is an empty dataset.
//
// Throws Error(kParseError, line) for malformed JSON and
// Error(kValidationError, line) for schema or invariant violations.
std::vector<EvalRecord> LoadDataset(const std::filesystem::path& path);

// Writes the header and records; every record carries its human_scale.
void SaveDataset(const std::filesystem::path& path,
                 const std::vector<EvalRecord>& records,
                 const HumanScale& default_scale = {});

}  // namespace maskeval

#endif  // MASKEVAL_DATASET_H_
