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

#include "maskeval/serialization.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "maskeval/error.h"

namespace maskeval {
namespace {

using nlohmann::json;

json StepToJson(const StepRef& step) {
  return {{"side", SideName(step.side)}, {"word_index", step.word_index}};
}

json WeightsToJson(const WeightAssignment& wa) {
  return {{"w_x", wa.w_x}, {"w_y", wa.w_y}, {"c", wa.c}};
}

// Shortest representation that round-trips; "nan" for undefined values.
std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

[[noreturn]] void Malformed(const std::string& reason) {
  throw Error(ErrorCode::kValidationError, "weighter file: " + reason);
}

}  // namespace

json ToJson(const ScoreReport& report) {
  json out;
  out["pair_id"] = report.pair_id;
  out["final_score"] =
      report.final_score ? json(*report.final_score) : json(nullptr);
  json steps = json::array();
  for (const StepScore& s : report.step_scores) {
    steps.push_back({{"side", SideName(s.side)},
                     {"word_index", s.word_index},
                     {"value", s.value}});
  }
  out["step_scores"] = std::move(steps);
  out["weights"] = WeightsToJson(report.weights);
  if (report.retained_steps) {
    json retained = json::array();
    for (const StepRef& step : *report.retained_steps) {
      retained.push_back(StepToJson(step));
    }
    out["retained_steps"] = std::move(retained);
  }
  json failures = json::array();
  for (const StepFailure& f : report.failures) {
    json entry = {{"error", ErrorCodeName(f.code)}, {"message", f.message}};
    if (f.step) entry["step"] = StepToJson(*f.step);
    failures.push_back(std::move(entry));
  }
  out["failures"] = std::move(failures);
  return out;
}

json ToJson(const CorrelationReport& report) {
  return {{"dimension_label", report.dimension_label},
          {"pearson_r", report.pearson_r},
          {"n_pairs", report.n_pairs},
          {"n_failed", report.n_failed}};
}

json ToJson(const PosDistribution& dist) {
  return {{"candidate", dist.candidate},
          {"source", dist.source},
          {"n_pairs", dist.n_pairs}};
}

json ToJson(const WeighterParams& params) {
  json out = {{"version", kWeighterFormatVersion},
              {"dimension_label", params.dimension_label},
              {"d", params.dim()},
              {"W", params.w},
              {"theta_c", params.theta_c}};
  if (params.training_meta) {
    const TrainingMeta& meta = *params.training_meta;
    out["training_meta"] = {{"seed", meta.seed},
                            {"epochs", meta.epochs},
                            {"lr", meta.lr},
                            {"val_loss", meta.val_loss},
                            {"best_epoch", meta.best_epoch}};
  }
  return out;
}

json MlmExampleToJson(const MaskedSequence& seq, const std::string& pair_id) {
  return {{"input_tokens", seq.tokens},
          {"target_word", seq.truth},
          {"side", SideName(seq.side)},
          {"word_index", seq.word_index},
          {"pair_id", pair_id}};
}

WeighterParams WeighterParamsFromJson(const json& doc) {
  if (!doc.is_object()) Malformed("not a JSON object");
  if (doc.value("version", -1) != kWeighterFormatVersion) {
    Malformed("unsupported version");
  }
  WeighterParams params;
  try {
    params.dimension_label = doc.at("dimension_label").get<std::string>();
    params.w = doc.at("W").get<std::vector<double>>();
    params.theta_c = doc.at("theta_c").get<double>();
    if (doc.at("d").get<std::size_t>() != params.w.size()) {
      Malformed("'d' does not match the length of 'W'");
    }
    if (doc.contains("training_meta")) {
      const json& meta = doc["training_meta"];
      params.training_meta =
          TrainingMeta{meta.at("seed").get<std::uint64_t>(),
                       meta.at("epochs").get<int>(), meta.at("lr").get<double>(),
                       meta.at("val_loss").get<double>(),
                       meta.value("best_epoch", 0)};
    }
  } catch (const json::exception& e) {
    Malformed(e.what());
  }
  if (params.w.empty()) Malformed("'W' is empty");
  for (double x : params.w) {
    if (!std::isfinite(x)) Malformed("non-finite weight");
  }
  if (!std::isfinite(params.theta_c)) Malformed("non-finite theta_c");
  return params;
}

void SaveWeighterParams(const std::filesystem::path& path,
                        const WeighterParams& params) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << ToJson(params).dump(2) << '\n';
}

WeighterParams LoadWeighterParams(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return WeighterParamsFromJson(doc);
}

void WriteSparsityCsv(std::ostream& out,
                      std::span<const SparsityPoint> points) {
  out << "dimension,threshold,retained_mean,retained_fraction_mean,n_pairs,"
         "pearson_r\n";
  for (const SparsityPoint& p : points) {
    out << p.dimension_label << ',' << FormatDouble(p.threshold) << ','
        << FormatDouble(p.retained_mean) << ','
        << FormatDouble(p.retained_fraction_mean) << ',' << p.n_pairs << ','
        << FormatDouble(p.pearson_r) << '\n';
  }
}

}  // namespace maskeval
