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

#include "maskeval/dataset.h"

#include <cmath>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "maskeval/error.h"

namespace maskeval {
namespace {

using nlohmann::json;

[[noreturn]] void Invalid(const std::string& reason) {
  throw Error(ErrorCode::kValidationError, reason);
}

const json& Field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) Invalid(std::string("missing field '") + name + "'");
  return *it;
}

std::string StringField(const json& obj, const char* name) {
  const json& value = Field(obj, name);
  if (!value.is_string()) Invalid(std::string("'") + name + "' must be a string");
  return value.get<std::string>();
}

std::vector<Span> SpansField(const json& obj, const char* name) {
  const json& value = Field(obj, name);
  if (!value.is_array()) Invalid(std::string("'") + name + "' must be a list");
  std::vector<Span> spans;
  spans.reserve(value.size());
  for (const json& pair : value) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
        !pair[1].is_number_unsigned()) {
      Invalid(std::string("'") + name +
              "' entries must be [start, end] pairs of non-negative integers");
    }
    spans.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
  }
  return spans;
}

HumanScale ParseScale(const json& value) {
  if (!value.is_object()) Invalid("'human_scale' must be an object");
  const json& lo = Field(value, "min");
  const json& hi = Field(value, "max");
  if (!lo.is_number() || !hi.is_number()) {
    Invalid("'human_scale' bounds must be numbers");
  }
  HumanScale scale{lo.get<double>(), hi.get<double>()};
  if (!(scale.min < scale.max)) Invalid("'human_scale' needs min < max");
  return scale;
}

std::vector<std::string> TagList(const json& obj, const char* name) {
  const json& value = Field(obj, name);
  if (!value.is_array()) Invalid(std::string("'") + name + "' must be a list");
  std::vector<std::string> tags;
  for (const json& tag : value) {
    if (!tag.is_string()) Invalid("POS tags must be strings");
    tags.push_back(tag.get<std::string>());
  }
  return tags;
}

EvalRecord ParseRecord(const json& obj, const HumanScale& default_scale) {
  if (!obj.is_object()) Invalid("record must be a JSON object");
  EvalRecord record;
  record.pair_id = StringField(obj, "pair_id");
  record.candidate_text = StringField(obj, "candidate_text");
  record.source_text = StringField(obj, "source_text");
  record.candidate_ling_spans = SpansField(obj, "candidate_ling_spans");
  record.candidate_sub_spans = SpansField(obj, "candidate_sub_spans");
  record.source_ling_spans = SpansField(obj, "source_ling_spans");
  record.source_sub_spans = SpansField(obj, "source_sub_spans");
  record.human_scale = obj.contains("human_scale")
                           ? ParseScale(obj["human_scale"])
                           : default_scale;
  if (obj.contains("human_scores")) {
    const json& scores = obj["human_scores"];
    if (!scores.is_object()) Invalid("'human_scores' must be an object");
    for (const auto& [label, value] : scores.items()) {
      if (!value.is_number()) Invalid("human score '" + label + "' not numeric");
      record.human_scores[label] = value.get<double>();
    }
  }
  if (obj.contains("pos_tags")) {
    const json& tags = obj["pos_tags"];
    if (!tags.is_object()) Invalid("'pos_tags' must be an object");
    record.pos_tags = PosTags{TagList(tags, "candidate"), TagList(tags, "source")};
  }
  return record;
}

json SpansToJson(const std::vector<Span>& spans) {
  json out = json::array();
  for (const Span& span : spans) out.push_back({span.start, span.end});
  return out;
}

json ScaleToJson(const HumanScale& scale) {
  return {{"min", scale.min}, {"max", scale.max}};
}

}  // namespace

double ScaleHumanScore(double raw, const HumanScale& scale) {
  if (!(scale.min < scale.max)) {
    throw Error(ErrorCode::kInvalidArgument, "human scale needs min < max");
  }
  if (!(raw >= scale.min && raw <= scale.max)) {
    throw Error(ErrorCode::kOutOfRange,
                "score " + std::to_string(raw) + " outside [" +
                    std::to_string(scale.min) + ", " +
                    std::to_string(scale.max) + "]");
  }
  return (raw - scale.min) / (scale.max - scale.min);
}

PairSegmentation SegmentRecord(const EvalRecord& record) {
  return PairSegmentation{
      Reconcile(record.candidate_text,
                Segmentation{record.candidate_text, record.candidate_ling_spans},
                Segmentation{record.candidate_text, record.candidate_sub_spans}),
      Reconcile(record.source_text,
                Segmentation{record.source_text, record.source_ling_spans},
                Segmentation{record.source_text, record.source_sub_spans})};
}

std::optional<double> HumanScore(const EvalRecord& record,
                                 const std::string& dimension) {
  auto it = record.human_scores.find(dimension);
  if (it == record.human_scores.end()) return std::nullopt;
  return ScaleHumanScore(it->second, record.human_scale);
}

void ValidateRecord(const EvalRecord& record) {
  if (record.pair_id.empty()) Invalid("empty pair_id");
  PairSegmentation pair;
  try {
    pair = SegmentRecord(record);
  } catch (const Error& e) {
    Invalid("pair '" + record.pair_id + "': " +
            std::string(ErrorCodeName(e.code())) + ": " + e.what());
  }
  if (pair.candidate.words.empty() && pair.source.words.empty()) {
    Invalid("pair '" + record.pair_id + "' has no words");
  }
  if (!(record.human_scale.min < record.human_scale.max)) {
    Invalid("human_scale needs min < max");
  }
  for (const auto& [label, raw] : record.human_scores) {
    if (!(raw >= record.human_scale.min && raw <= record.human_scale.max)) {
      Invalid("human score '" + label + "' = " + std::to_string(raw) +
              " is outside the declared scale");
    }
  }
  if (record.pos_tags &&
      (record.pos_tags->candidate.size() != pair.candidate.size() ||
       record.pos_tags->source.size() != pair.source.size())) {
    Invalid("pos_tags do not align with the reconciled words of pair '" +
            record.pair_id + "'");
  }
}

std::vector<EvalRecord> LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  std::vector<EvalRecord> records;
  std::optional<HumanScale> default_scale;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    try {
      if (!default_scale) {
        if (!obj.is_object() || !obj.contains("schema")) {
          Invalid("first line must be a header with a 'schema' field");
        }
        if (obj["schema"] != kDatasetSchemaVersion) {
          Invalid("unsupported schema version " + obj["schema"].dump());
        }
        default_scale = obj.contains("human_scale")
                            ? ParseScale(obj["human_scale"])
                            : HumanScale{};
        continue;
      }
      EvalRecord record = ParseRecord(obj, *default_scale);
      ValidateRecord(record);
      records.push_back(std::move(record));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what(),
                  line_no);
    }
  }
  return records;
}

void SaveDataset(const std::filesystem::path& path,
                 const std::vector<EvalRecord>& records,
                 const HumanScale& default_scale) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  out << json{{"schema", kDatasetSchemaVersion},
              {"human_scale", ScaleToJson(default_scale)}}
             .dump()
      << '\n';
  for (const EvalRecord& record : records) {
    json obj = {
        {"pair_id", record.pair_id},
        {"candidate_text", record.candidate_text},
        {"source_text", record.source_text},
        {"candidate_ling_spans", SpansToJson(record.candidate_ling_spans)},
        {"candidate_sub_spans", SpansToJson(record.candidate_sub_spans)},
        {"source_ling_spans", SpansToJson(record.source_ling_spans)},
        {"source_sub_spans", SpansToJson(record.source_sub_spans)},
        {"human_scores", json(record.human_scores)},
        {"human_scale", ScaleToJson(record.human_scale)},
    };
    if (record.pos_tags) {
      obj["pos_tags"] = {{"candidate", record.pos_tags->candidate},
                         {"source", record.pos_tags->source}};
    }
    out << obj.dump() << '\n';
  }
}

}  // namespace maskeval
