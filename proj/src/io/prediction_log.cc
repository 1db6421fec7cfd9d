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

#include "mmval/io/prediction_log.h"

#include <fstream>
#include <istream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmval/error.h"

namespace mmval::io {
namespace {

using nlohmann::json;

constexpr std::string_view kModalitiesComment = "modalities:";

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void Fail(ErrorCode code, std::size_t line,
                       const std::string& message) {
  throw ParseError(code, line, "line " + std::to_string(line) + ": " + message);
}

const json& Require(const json& object, const char* key, std::size_t line) {
  const auto it = object.find(key);
  if (it == object.end()) {
    Fail(ErrorCode::kParseError, line,
         std::string("missing key \"") + key + "\"");
  }
  return *it;
}

int RequireInt(const json& value, const char* what, std::size_t line) {
  if (!value.is_number_integer()) {
    Fail(ErrorCode::kParseError, line, std::string(what) + " must be an integer");
  }
  const auto v = value.get<long long>();
  if (v < INT32_MIN || v > INT32_MAX) {
    Fail(ErrorCode::kParseError, line, std::string(what) + " is out of range");
  }
  return static_cast<int>(v);
}

// Parses `text`, rejecting any object that repeats a key.
json ParseRejectingDuplicates(std::string_view text, std::size_t line) {
  std::vector<std::set<std::string>> open;
  std::string duplicate;
  int duplicate_depth = 0;
  json parsed;
  try {
    parsed = json::parse(
        text, [&](int depth, json::parse_event_t event, json& value) {
          switch (event) {
            case json::parse_event_t::object_start:
              open.emplace_back();
              break;
            case json::parse_event_t::object_end:
              open.pop_back();
              break;
            case json::parse_event_t::key:
              if (!open.back().insert(value.get<std::string>()).second &&
                  duplicate.empty()) {
                duplicate = value.get<std::string>();
                duplicate_depth = depth;
              }
              break;
            default:
              break;
          }
          return true;
        });
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kParseError, line, std::string("invalid JSON: ") + e.what());
  }
  if (!duplicate.empty()) {
    if (duplicate_depth == 2) {
      Fail(ErrorCode::kDuplicateSubsetKey, line,
           "subset key \"" + duplicate + "\" appears more than once");
    }
    Fail(ErrorCode::kParseError, line,
         "key \"" + duplicate + "\" appears more than once");
  }
  return parsed;
}

}  // namespace

SubsetPredictionRecord ParsePredictionLine(std::string_view line,
                                           std::size_t line_number,
                                           bool allow_partial) {
  const json doc = ParseRejectingDuplicates(line, line_number);
  if (!doc.is_object()) {
    Fail(ErrorCode::kParseError, line_number, "record must be a JSON object");
  }
  SubsetPredictionRecord record;
  const json& id = Require(doc, "sample_id", line_number);
  if (!id.is_string()) {
    Fail(ErrorCode::kParseError, line_number, "sample_id must be a string");
  }
  record.sample_id = id.get<std::string>();
  record.true_label =
      RequireInt(Require(doc, "true_label", line_number), "true_label",
                 line_number);
  record.n = RequireInt(Require(doc, "n", line_number), "n", line_number);
  if (record.n < 1 || record.n > kMaxMaskModalities) {
    Fail(ErrorCode::kParseError, line_number,
         "n must be in [1, " + std::to_string(kMaxMaskModalities) + "]");
  }
  if (!allow_partial && record.n > kMaxExactModalities) {
    Fail(ErrorCode::kTooManyModalities, line_number,
         "n=" + std::to_string(record.n) +
             " exceeds the exhaustive limit of " +
             std::to_string(kMaxExactModalities) +
             "; ingest as partial for Monte Carlo");
  }
  const json& predictions = Require(doc, "predictions", line_number);
  if (!predictions.is_object()) {
    Fail(ErrorCode::kParseError, line_number, "predictions must be an object");
  }
  for (const auto& [key, value] : predictions.items()) {
    SubsetMask mask;
    try {
      mask = SubsetMask::FromKey(key, kMaxMaskModalities);
    } catch (const Error&) {
      Fail(ErrorCode::kParseError, line_number,
           "malformed subset key \"" + key + "\"");
    }
    if ((mask.bits() >> record.n) != 0) {
      Fail(ErrorCode::kInconsistentModalityCount, line_number,
           "subset key \"" + key + "\" names a modality outside n=" +
               std::to_string(record.n));
    }
    record.predictions[mask.bits()] =
        RequireInt(value, "predicted label", line_number);
  }
  if (!allow_partial) {
    for (std::uint32_t bits = 1; bits < SubsetCount(record.n); ++bits) {
      if (!record.predictions.contains(bits)) {
        Fail(ErrorCode::kParseError, line_number,
             "missing subset key \"" + SubsetMask(bits, record.n).Key() +
                 "\"");
      }
    }
  }
  return record;
}

std::string FormatPredictionLine(const SubsetPredictionRecord& record) {
  // nlohmann's default object sorts keys lexicographically; build the
  // predictions member by hand to keep mask order.
  std::string out = "{\"sample_id\":" + json(record.sample_id).dump() +
                    ",\"true_label\":" + std::to_string(record.true_label) +
                    ",\"n\":" + std::to_string(record.n) + ",\"predictions\":{";
  bool first = true;
  for (const auto& [bits, label] : record.predictions) {
    if (!first) out += ',';
    first = false;
    out += '"' + SubsetMask(bits, record.n).Key() + "\":" + std::to_string(label);
  }
  out += "}}";
  return out;
}

PredictionLogReader::PredictionLogReader(std::istream& in,
                                         IngestOptions options)
    : in_(in), options_(options) {}

std::optional<SubsetPredictionRecord> PredictionLogReader::Next() {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++line_number_;
    const std::string_view line = Trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = Trim(line.substr(1));
      if (body.starts_with(kModalitiesComment)) {
        names_.clear();
        std::string_view rest = Trim(body.substr(kModalitiesComment.size()));
        while (!rest.empty()) {
          const auto comma = rest.find(',');
          names_.emplace_back(Trim(rest.substr(0, comma)));
          if (comma == std::string_view::npos) break;
          rest = rest.substr(comma + 1);
        }
      }
      continue;
    }
    try {
      SubsetPredictionRecord record =
          ParsePredictionLine(line, line_number_, options_.allow_partial);
      if (n_.has_value() && *n_ != record.n) {
        Fail(ErrorCode::kInconsistentModalityCount, line_number_,
             "n=" + std::to_string(record.n) + " differs from n=" +
                 std::to_string(*n_) + " of earlier records");
      }
      if (!names_.empty() && static_cast<int>(names_.size()) != record.n) {
        Fail(ErrorCode::kInconsistentModalityCount, line_number_,
             "n=" + std::to_string(record.n) + " but the header names " +
                 std::to_string(names_.size()) + " modalities");
      }
      n_ = record.n;
      return record;
    } catch (const ParseError& e) {
      if (options_.strict) throw;
      skipped_.push_back({line_number_, e.what()});
    }
  }
  if (in_.bad()) {
    throw Error(ErrorCode::kIoError, "read failure after line " +
                                         std::to_string(line_number_));
  }
  return std::nullopt;
}

IngestResult Ingest(std::istream& in, const IngestOptions& options) {
  PredictionLogReader reader(in, options);
  IngestResult result;
  while (auto record = reader.Next()) {
    result.records.push_back(std::move(*record));
  }
  result.skipped = reader.skipped();
  result.modality_names = reader.modality_names();
  return result;
}

IngestResult IngestFile(const std::string& path,
                        const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return Ingest(in, options);
}

}  // namespace mmval::io
