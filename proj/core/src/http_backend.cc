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
#include <regex>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "maskeval/backends.h"

namespace maskeval {
namespace {

using nlohmann::json;

json ParseBody(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedResponse,
                std::string("response is not JSON: ") + e.what());
  }
}

}  // namespace

std::string StripSentinels(std::string_view raw) {
  static const std::regex kSentinel("<extra_id_[0-9]+>");
  const std::string stripped =
      std::regex_replace(std::string(raw), kSentinel, " ");
  return std::string(TrimWhitespace(stripped));
}

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch match;
  if (!std::regex_match(options_.base_url, match, kUrl)) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid backend url '" + options_.base_url + "'");
  }
  scheme_host_port_ = match[1].str();
  path_prefix_ = match[2].matched ? match[2].str() : "";
  while (!path_prefix_.empty() && path_prefix_.back() == '/') {
    path_prefix_.pop_back();
  }
}

std::string HttpBackend::Post(const std::string& path,
                              const std::string& body) const {
  // httplib::Client is not safe for concurrent requests; one per call.
  httplib::Client client(scheme_host_port_);
  const auto timeout_s = options_.timeout.count() / 1000;
  const auto timeout_us = (options_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(timeout_s, timeout_us);
  client.set_read_timeout(timeout_s, timeout_us);
  client.set_write_timeout(timeout_s, timeout_us);

  auto result = client.Post(path_prefix_ + path, body, "application/json");
  if (!result) {
    throw Error(ErrorCode::kBackendUnavailable,
                "request to " + scheme_host_port_ + path_prefix_ + path +
                    " failed: " + httplib::to_string(result.error()));
  }
  if (result->status >= 500 || result->status == 429) {
    throw Error(ErrorCode::kBackendUnavailable,
                "backend returned HTTP " + std::to_string(result->status));
  }
  if (result->status != 200) {
    throw Error(ErrorCode::kMalformedResponse,
                "backend returned HTTP " + std::to_string(result->status));
  }
  return result->body;
}

Prediction HttpBackend::Predict(const MaskedSequence& seq) const {
  const json request = {{"tokens", seq.tokens},
                        {"mask_index", seq.mask_position}};
  const json response = ParseBody(Post(options_.predict_path, request.dump()));
  if (!response.is_object() || !response.contains("word") ||
      !response["word"].is_string()) {
    throw Error(ErrorCode::kMalformedResponse,
                "predict response lacks a string 'word'");
  }
  std::string word = StripSentinels(response["word"].get<std::string>());
  if (word.empty()) {
    throw Error(ErrorCode::kMalformedResponse, "predicted word is empty");
  }
  return Prediction{std::move(word)};
}

TokenEmbeddings HttpBackend::Embed(std::span<const std::string> candidate,
                                   std::span<const std::string> source) const {
  if (candidate.empty() && source.empty()) {
    throw Error(ErrorCode::kEmptyPair, "nothing to embed");
  }
  std::vector<std::string> tokens(candidate.begin(), candidate.end());
  tokens.push_back(options_.separator_sentinel);
  tokens.insert(tokens.end(), source.begin(), source.end());

  const json request = {{"tokens", tokens}};
  const json response = ParseBody(Post(options_.embed_path, request.dump()));
  if (!response.is_object() || !response.contains("vectors") ||
      !response["vectors"].is_array()) {
    throw Error(ErrorCode::kMalformedResponse,
                "embed response lacks a 'vectors' array");
  }
  const json& vectors = response["vectors"];
  if (vectors.size() != tokens.size()) {
    throw Error(ErrorCode::kMalformedResponse,
                "expected " + std::to_string(tokens.size()) + " vectors, got " +
                    std::to_string(vectors.size()));
  }
  TokenEmbeddings out;
  for (const json& row : vectors) {
    if (!row.is_array() || row.empty()) {
      throw Error(ErrorCode::kMalformedResponse, "embedding row is not a list");
    }
    if (out.dim == 0) {
      out.dim = row.size();
      out.values.reserve(out.dim * tokens.size());
    } else if (row.size() != out.dim) {
      throw Error(ErrorCode::kMalformedResponse, "ragged embedding rows");
    }
    for (const json& x : row) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        throw Error(ErrorCode::kMalformedResponse,
                    "embedding contains a non-finite value");
      }
      out.values.push_back(x.get<double>());
    }
  }
  return out;
}

}  // namespace maskeval
