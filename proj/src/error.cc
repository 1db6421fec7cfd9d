/*
 * Copyright 2026 The mmval Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mmval/error.h"

namespace mmval {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingSubset:
      return "MissingSubset";
    case ErrorCode::kTooManyModalities:
      return "TooManyModalities";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kEmptyDataset:
      return "EmptyDataset";
    case ErrorCode::kSingleModality:
      return "SingleModality";
    case ErrorCode::kNonPositiveHyperparam:
      return "NonPositiveHyperparam";
    case ErrorCode::kDegenerateGaps:
      return "DegenerateGaps";
    case ErrorCode::kInadmissibleTable:
      return "InadmissibleTable";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kNonFiniteLoss:
      return "NonFiniteLoss";
    case ErrorCode::kUnsupportedModalityCount:
      return "UnsupportedModalityCount";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kInconsistentModalityCount:
      return "InconsistentModalityCount";
    case ErrorCode::kDuplicateSubsetKey:
      return "DuplicateSubsetKey";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

ParseError::ParseError(ErrorCode code, std::size_t line,
                       const std::string& message)
    : Error(code, "line " + std::to_string(line) + ": " + message),
      line_(line) {}

}  // namespace mmval
