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

#include "mmval/io/tables.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "mmval/error.h"

namespace mmval::io {
namespace {

std::string QuoteField(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (const char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

std::vector<std::string> SplitCsvLine(std::string_view line, std::size_t row) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"' && fields.back().empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) {
    throw ParseError(ErrorCode::kParseError, row,
                     "line " + std::to_string(row) + ": unterminated quote");
  }
  return fields;
}

double ParseReal(const std::string& text, std::size_t row) {
  double value = 0.0;
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw ParseError(ErrorCode::kParseError, row,
                     "line " + std::to_string(row) + ": \"" + text +
                         "\" is not a number");
  }
  return value;
}

template <typename T>
bool ParseInteger(std::string_view text, T& value) {
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  return !text.empty() && ec == std::errc() &&
         end == text.data() + text.size();
}

void ParseMethod(const std::string& label, std::size_t row,
                 ContributionVector& vector) {
  if (label == "exact") {
    vector.method = ShapleyMethod::kExact;
    return;
  }
  const std::string_view text = label;
  const auto second = text.find(':', 3);
  if (text.starts_with("mc:") && second != std::string_view::npos &&
      ParseInteger(text.substr(3, second - 3), vector.permutations) &&
      vector.permutations > 0 &&
      ParseInteger(text.substr(second + 1), vector.seed)) {
    vector.method = ShapleyMethod::kMonteCarlo;
    return;
  }
  throw ParseError(ErrorCode::kParseError, row,
                   "line " + std::to_string(row) + ": unknown method \"" +
                       label + "\"");
}

}  // namespace

std::string FormatReal(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void WriteContributionsCsv(std::span<const ContributionVector> vectors,
                           std::ostream& out) {
  const int n = vectors.empty() ? 0 : vectors.front().n();
  out << "sample_id";
  for (int i = 0; i < n; ++i) out << ",phi_" << i;
  out << ",grand_benefit,method\n";
  for (const auto& v : vectors) {
    if (v.n() != n) {
      throw Error(ErrorCode::kInconsistentModalityCount,
                  "contribution vectors disagree on n");
    }
    out << QuoteField(v.sample_id);
    for (const double phi : v.phi) out << ',' << FormatReal(phi);
    out << ',' << FormatReal(v.grand_benefit) << ',' << v.MethodLabel()
        << '\n';
  }
}

std::vector<ContributionVector> ReadContributionsCsv(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) header = SplitCsvLine(line, row);
  }
  if (header.empty()) {
    throw ParseError(ErrorCode::kParseError, row, "missing CSV header");
  }
  const int n = static_cast<int>(header.size()) - 3;
  bool header_ok = n >= 1 && header.front() == "sample_id" &&
                   header[header.size() - 2] == "grand_benefit" &&
                   header.back() == "method";
  for (int i = 0; header_ok && i < n; ++i) {
    header_ok = header[1 + i] == "phi_" + std::to_string(i);
  }
  if (!header_ok) {
    throw ParseError(ErrorCode::kParseError, row,
                     "line " + std::to_string(row) +
                         ": expected sample_id,phi_0,...,grand_benefit,method");
  }

  std::vector<ContributionVector> vectors;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = SplitCsvLine(line, row);
    if (fields.size() != header.size()) {
      throw ParseError(ErrorCode::kInconsistentModalityCount, row,
                       "line " + std::to_string(row) + ": " +
                           std::to_string(fields.size()) +
                           " fields, header has " +
                           std::to_string(header.size()));
    }
    ContributionVector v;
    v.sample_id = fields.front();
    for (int i = 0; i < n; ++i) v.phi.push_back(ParseReal(fields[1 + i], row));
    v.grand_benefit = ParseReal(fields[1 + n], row);
    ParseMethod(fields.back(), row, v);
    vectors.push_back(std::move(v));
  }
  return vectors;
}

std::vector<ContributionVector> ReadContributionsCsvFile(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return ReadContributionsCsv(in);
}

void WriteSamplePlanCsv(const SampleResamplePlan& plan, std::ostream& out) {
  out << "sample_id,modality,count\n";
  for (const auto& [id, counts] : plan.entries) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] > 0) {
        out << QuoteField(id) << ',' << i << ',' << counts[i] << '\n';
      }
    }
  }
}

void WriteModalityPlanCsv(const ModalityResamplePlan& plan,
                          std::ostream& out) {
  out << "target_modality,probability,subset_size,d,d_norm\n"
      << plan.target_modality << ',' << FormatReal(plan.probability) << ','
      << plan.subset_size << ',' << FormatReal(plan.d) << ','
      << FormatReal(plan.d_norm) << '\n';
}

}  // namespace mmval::io
