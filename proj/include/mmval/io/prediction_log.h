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

#ifndef MMVAL_IO_PREDICTION_LOG_H_
#define MMVAL_IO_PREDICTION_LOG_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmval/valuation.h"

namespace mmval::io {

// Line-delimited JSON, one sample per line:
//   {"sample_id": "s1", "true_label": 3, "n": 2,
//    "predictions": {"0": 3, "1": 0, "0,1": 3}}
// Keys are canonical subset keys (strictly increasing indices joined by ',').
// Blank lines and lines starting with '#' are skipped; a comment of the form
// "# modalities: audio,visual" records the index -> name mapping.

struct IngestOptions {
  // Strict mode throws on the first bad line; lenient mode skips and counts.
  bool strict = true;
  // Accept lines that do not cover every nonempty subset (MC valuation).
  bool allow_partial = false;
};

struct IngestIssue {
  std::size_t line = 0;
  std::string message;
};

// Parses one record line. Throws ParseError with code ParseError,
// InconsistentModalityCount or DuplicateSubsetKey.
SubsetPredictionRecord ParsePredictionLine(std::string_view line,
                                           std::size_t line_number,
                                           bool allow_partial);

// Canonical serialization: keys in mask order, compact JSON.
std::string FormatPredictionLine(const SubsetPredictionRecord& record);

// Streams validated records from a log in file order.
class PredictionLogReader {
 public:
  PredictionLogReader(std::istream& in, IngestOptions options);

  // Next valid record, or nullopt at end of input.
  std::optional<SubsetPredictionRecord> Next();

  const std::vector<IngestIssue>& skipped() const { return skipped_; }
  const std::vector<std::string>& modality_names() const { return names_; }
  std::size_t lines_read() const { return line_number_; }

 private:
  std::istream& in_;
  IngestOptions options_;
  std::size_t line_number_ = 0;
  std::optional<int> n_;
  std::vector<IngestIssue> skipped_;
  std::vector<std::string> names_;
};

struct IngestResult {
  std::vector<SubsetPredictionRecord> records;
  std::vector<IngestIssue> skipped;
  std::vector<std::string> modality_names;
};

IngestResult Ingest(std::istream& in, const IngestOptions& options);
// Throws Error(IoError) if the file cannot be opened.
IngestResult IngestFile(const std::string& path, const IngestOptions& options);

}  // namespace mmval::io

#endif  // MMVAL_IO_PREDICTION_LOG_H_
