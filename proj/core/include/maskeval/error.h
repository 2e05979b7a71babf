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

#ifndef MASKEVAL_ERROR_H_
#define MASKEVAL_ERROR_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace maskeval {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidSegmentation,
  kCoverageMismatch,
  kEmptyPair,
  kEmptyCandidate,
  kBackendUnavailable,
  kMalformedResponse,
  kDimensionMismatch,
  kEmptyDataset,
  kDegenerateSplit,
  kInsufficientData,
  kAlignmentMismatch,
  kParseError,
  kValidationError,
  kOutOfRange,
  kIoError,
};

// Stable name used in structured error output, e.g. "CoverageMismatch".
std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported as maskeval::Error. Dataset errors carry
// the 1-based line number of the offending record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(message), code_(code), line_(line) {}

  ErrorCode code() const { return code_; }
  const std::optional<std::size_t>& line() const { return line_; }

  // Backend failures that the pipeline retries.
  bool retryable() const { return code_ == ErrorCode::kBackendUnavailable; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace maskeval

#endif  // MASKEVAL_ERROR_H_
