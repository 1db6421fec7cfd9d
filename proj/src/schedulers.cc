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

#include "mmval/schedulers.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "mmval/error.h"

namespace mmval {
namespace {

double ParseNumber(std::string_view token, std::string_view context) {
  double value = 0.0;
  const auto [end, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() ||
      end != token.data() + token.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad number \"" + std::string(token) + "\" in map spec \"" +
                    std::string(context) + "\"");
  }
  return value;
}

std::vector<std::string_view> Split(std::string_view text, char separator) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(separator, pos);
    parts.push_back(text.substr(pos, next == std::string_view::npos
                                         ? std::string_view::npos
                                         : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

void RequirePositive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " must be positive and finite");
  }
}

}  // namespace

MonotoneMap MonotoneMap::Linear(double scale) {
  RequirePositive(scale, "linear scale");
  return MonotoneMap(Kind::kLinear, scale, 1.0);
}

MonotoneMap MonotoneMap::Tanh(double scale) {
  RequirePositive(scale, "tanh scale");
  return MonotoneMap(Kind::kTanh, scale, 1.0);
}

MonotoneMap MonotoneMap::Power(double exponent, double scale) {
  RequirePositive(exponent, "power exponent");
  RequirePositive(scale, "power scale");
  return MonotoneMap(Kind::kPower, exponent, scale);
}

MonotoneMap MonotoneMap::Step(std::vector<double> thresholds,
                              std::vector<double> values) {
  if (thresholds.empty() || thresholds.size() != values.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "step map needs matching nonempty thresholds and values");
  }
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!std::isfinite(thresholds[i]) || !std::isfinite(values[i]) ||
        values[i] < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "step map entries must be finite with values >= 0");
    }
    if (i > 0 && (thresholds[i] <= thresholds[i - 1] ||
                  values[i] < values[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "step map must have increasing thresholds and "
                  "nondecreasing values");
    }
  }
  MonotoneMap map(Kind::kStep, 1.0, 1.0);
  map.thresholds_ = std::move(thresholds);
  map.values_ = std::move(values);
  return map;
}

MonotoneMap MonotoneMap::Parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (kind == "identity" && args.empty()) return Linear(1.0);
  if (kind == "linear") {
    return Linear(args.empty() ? 1.0 : ParseNumber(args, text));
  }
  if (kind == "tanh") {
    return Tanh(args.empty() ? 1.0 : ParseNumber(args, text));
  }
  if (kind == "power" && !args.empty()) {
    const auto parts = Split(args, ',');
    if (parts.size() > 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "power map takes exponent[,scale]: \"" + std::string(text) +
                      "\"");
    }
    const double exponent = ParseNumber(parts[0], text);
    const double scale = parts.size() == 2 ? ParseNumber(parts[1], text) : 1.0;
    return Power(exponent, scale);
  }
  if (kind == "step" && !args.empty()) {
    std::vector<double> thresholds;
    std::vector<double> values;
    for (std::string_view entry : Split(args, ';')) {
      const std::size_t eq = entry.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::kInvalidArgument,
                    "step entries are threshold=value: \"" +
                        std::string(text) + "\"");
      }
      thresholds.push_back(ParseNumber(entry.substr(0, eq), text));
      values.push_back(ParseNumber(entry.substr(eq + 1), text));
    }
    return Step(std::move(thresholds), std::move(values));
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown map spec \"" + std::string(text) + "\"");
}

double MonotoneMap::operator()(double x) const {
  switch (kind_) {
    case Kind::kLinear:
      return a_ * x;
    case Kind::kTanh:
      return a_ * std::tanh(x);
    case Kind::kPower:
      return b_ * std::copysign(std::pow(std::abs(x), a_), x);
    case Kind::kStep: {
      const auto it =
          std::upper_bound(thresholds_.begin(), thresholds_.end(), x);
      if (it == thresholds_.begin()) return 0.0;
      return values_[static_cast<std::size_t>(it - thresholds_.begin()) - 1];
    }
  }
  return 0.0;
}

double MonotoneMap::Probability(double x) const {
  return std::clamp((*this)(x), 0.0, 1.0);
}

std::string MonotoneMap::ToString() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::kLinear:
      out << "linear:" << a_;
      break;
    case Kind::kTanh:
      out << "tanh:" << a_;
      break;
    case Kind::kPower:
      out << "power:" << a_ << "," << b_;
      break;
    case Kind::kStep:
      out << "step:";
      for (std::size_t i = 0; i < thresholds_.size(); ++i) {
        if (i) out << ";";
        out << thresholds_[i] << "=" << values_[i];
      }
      break;
  }
  return out.str();
}

MonotoneMap DefaultSampleMap() { return MonotoneMap::Linear(2.0); }

std::vector<MonotoneMap> ShippedSampleMaps() {
  return {MonotoneMap::Linear(2.0), MonotoneMap::Tanh(3.0),
          MonotoneMap::Power(2.0, 2.0)};
}

std::vector<MonotoneMap> ShippedModalityMaps() {
  return {MonotoneMap::Linear(1.0), MonotoneMap::Tanh(1.0),
          MonotoneMap::Power(1.5)};
}

std::vector<int> SampleCounts(std::span<const double> phi,
                              const MonotoneMap& f_s) {
  std::vector<int> counts(phi.size(), 0);
  for (std::size_t j = 0; j < phi.size(); ++j) {
    if (phi[j] < 1.0 - kContributionTolerance) {
      const double frequency = f_s(1.0 - phi[j]);
      counts[j] = frequency > 0.0
                      ? static_cast<int>(std::ceil(frequency - 1e-9))
                      : 0;
    }
  }
  return counts;
}

long long SampleResamplePlan::TotalCount() const {
  long long total = 0;
  for (const auto& [id, counts] : entries) {
    for (int c : counts) total += c;
  }
  return total;
}

std::vector<long long> SampleResamplePlan::CountsPerModality() const {
  std::vector<long long> totals(n, 0);
  for (const auto& [id, counts] : entries) {
    for (int j = 0; j < n; ++j) totals[j] += counts[j];
  }
  return totals;
}

SampleResamplePlan SampleLevelPlan(std::span<const ContributionVector> vectors,
                                   const MonotoneMap& f_s) {
  SampleResamplePlan plan;
  if (vectors.empty()) return plan;
  plan.n = vectors.front().n();
  for (const auto& vector : vectors) {
    if (vector.n() != plan.n) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "sample \"" + vector.sample_id + "\" has n=" +
                      std::to_string(vector.n()) + ", expected " +
                      std::to_string(plan.n));
    }
    std::vector<int> counts = SampleCounts(vector.phi, f_s);
    if (std::any_of(counts.begin(), counts.end(),
                    [](int c) { return c > 0; })) {
      plan.entries[vector.sample_id] = std::move(counts);
    }
  }
  return plan;
}

ModalityResamplePlan ModalityLevelPlan(std::span<const double> avg_phi,
                                       const MonotoneMap& f_m,
                                       int subset_size) {
  const int n = static_cast<int>(avg_phi.size());
  if (n < 2) {
    throw Error(ErrorCode::kSingleModality,
                "modality-level planning needs at least two modalities");
  }
  ModalityResamplePlan plan;
  plan.subset_size = subset_size;
  plan.target_modality = static_cast<int>(
      std::min_element(avg_phi.begin(), avg_phi.end()) - avg_phi.begin());
  double gap = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j != plan.target_modality) {
      gap += avg_phi[j] - avg_phi[plan.target_modality];
    }
  }
  plan.d = gap / (n - 1);
  plan.d_norm = std::clamp(plan.d / n, 0.0, 1.0);
  plan.probability = f_m.Probability(plan.d_norm);
  return plan;
}

int SubsetSizeFromFraction(double fraction, std::size_t population) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "subset fraction must lie in (0, 1]");
  }
  const auto z = static_cast<long long>(std::llround(fraction * population));
  return static_cast<int>(
      std::clamp<long long>(z, 1, static_cast<long long>(population)));
}

std::vector<std::size_t> DrawSubset(std::size_t population, std::size_t z,
                                    std::uint64_t seed) {
  if (population == 0) {
    throw Error(ErrorCode::kEmptyDataset, "cannot draw from an empty dataset");
  }
  if (z < 1 || z > population) {
    throw Error(ErrorCode::kInvalidArgument,
                "subset size " + std::to_string(z) + " outside [1, " +
                    std::to_string(population) + "]");
  }
  // Partial Fisher-Yates; the first z slots form the sample.
  std::vector<std::size_t> indices(population);
  for (std::size_t i = 0; i < population; ++i) indices[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < z; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, population - 1);
    std::swap(indices[i], indices[pick(rng)]);
  }
  indices.resize(z);
  std::sort(indices.begin(), indices.end());
  return indices;
}

std::vector<double> AverageContributions(
    std::span<const ContributionVector> vectors) {
  if (vectors.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no contribution vectors to average");
  }
  const int n = vectors.front().n();
  std::vector<double> sum(n, 0.0);
  for (const auto& vector : vectors) {
    if (vector.n() != n) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "contribution vectors disagree on n");
    }
    for (int j = 0; j < n; ++j) sum[j] += vector.phi[j];
  }
  for (double& s : sum) s /= static_cast<double>(vectors.size());
  return sum;
}

std::vector<double> EstimateAverageContributions(
    std::span<const SubsetPredictionRecord> records, std::size_t z,
    std::uint64_t seed) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no records to estimate from");
  }
  std::vector<ContributionVector> vectors;
  vectors.reserve(z);
  for (std::size_t index : DrawSubset(records.size(), z, seed)) {
    vectors.push_back(ExactShapley(records[index]));
  }
  return AverageContributions(vectors);
}

}  // namespace mmval
