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

#include "maskeval/error.h"

namespace maskeval {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kInvalidSegmentation:
      return "InvalidSegmentation";
    case ErrorCode::kCoverageMismatch:
      return "CoverageMismatch";
    case ErrorCode::kEmptyPair:
      return "EmptyPair";
    case ErrorCode::kEmptyCandidate:
      return "EmptyCandidate";
    case ErrorCode::kBackendUnavailable:
      return "BackendUnavailable";
    case ErrorCode::kMalformedResponse:
      return "MalformedResponse";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kEmptyDataset:
      return "EmptyDataset";
    case ErrorCode::kDegenerateSplit:
      return "DegenerateSplit";
    case ErrorCode::kInsufficientData:
      return "InsufficientData";
    case ErrorCode::kAlignmentMismatch:
      return "AlignmentMismatch";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kValidationError:
      return "ValidationError";
    case ErrorCode::kOutOfRange:
      return "OutOfRange";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

}  // namespace maskeval
