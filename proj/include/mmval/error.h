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

#ifndef MMVAL_ERROR_H_
#define MMVAL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmval {

enum class ErrorCode {
  kMissingSubset,
  kTooManyModalities,
  kDimensionMismatch,
  kEmptyDataset,
  kSingleModality,
  kNonPositiveHyperparam,
  kDegenerateGaps,
  kInadmissibleTable,
  kInvalidArgument,
  kNonFiniteLoss,
  kUnsupportedModalityCount,
  kParseError,
  kInconsistentModalityCount,
  kDuplicateSubsetKey,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type. The code
// lets callers (notably the CLI) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures carry the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, const std::string& message);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mmval

#endif  // MMVAL_ERROR_H_
