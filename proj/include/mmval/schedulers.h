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

#ifndef MMVAL_SCHEDULERS_H_
#define MMVAL_SCHEDULERS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmval/valuation.h"

namespace mmval {

// Monotone nondecreasing scalar map used as the re-sample frequency function
// (sample level) or, clamped to [0, 1], as the re-sample probability function
// (modality level).
class MonotoneMap {
 public:
  enum class Kind { kLinear, kTanh, kPower, kStep };

  // x -> scale * x. scale must be > 0.
  static MonotoneMap Linear(double scale);
  // x -> scale * tanh(x).
  static MonotoneMap Tanh(double scale = 1.0);
  // x -> scale * sign(x) |x|^exponent. exponent must be > 0.
  static MonotoneMap Power(double exponent, double scale = 1.0);
  // 0 below thresholds[0]; values[i] on [thresholds[i], thresholds[i+1]).
  // Thresholds strictly increasing, values nondecreasing and >= 0.
  static MonotoneMap Step(std::vector<double> thresholds,
                          std::vector<double> values);

  // Accepts "identity", "linear[:k]", "tanh[:a]", "power:e[,scale]" and
  // "step:t0=v0;t1=v1;...". Throws InvalidArgument on anything else.
  static MonotoneMap Parse(std::string_view text);

  double operator()(double x) const;
  // Value clamped to [0, 1].
  double Probability(double x) const;

  Kind kind() const { return kind_; }
  std::string ToString() const;

 private:
  MonotoneMap(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_ = 1.0;
  double b_ = 1.0;
  std::vector<double> thresholds_;
  std::vector<double> values_;
};

// Default frequency map: linear with slope 2.
MonotoneMap DefaultSampleMap();
// The frequency maps exercised by the acceptance suite.
std::vector<MonotoneMap> ShippedSampleMaps();
// The probability maps exercised by the acceptance suite: identity, tanh,
// and d^1.5.
std::vector<MonotoneMap> ShippedModalityMaps();

// phi values within this distance below 1 are treated as 1, so rounding noise
// in exact Shapley sums never triggers a spurious re-sample.
inline constexpr double kContributionTolerance = 1e-9;

// Re-sample counts of one sample: ceil(f_s(1 - phi_j)) for phi_j < 1, else 0.
std::vector<int> SampleCounts(std::span<const double> phi,
                              const MonotoneMap& f_s);

struct SampleResamplePlan {
  int n = 0;
  // Only samples with at least one positive count appear.
  std::map<std::string, std::vector<int>> entries;

  long long TotalCount() const;
  std::vector<long long> CountsPerModality() const;
};

// Throws DimensionMismatch if the vectors disagree on n.
SampleResamplePlan SampleLevelPlan(std::span<const ContributionVector> vectors,
                                   const MonotoneMap& f_s);

struct ModalityResamplePlan {
  int target_modality = 0;
  double probability = 0.0;
  int subset_size = 0;
  double d = 0.0;
  double d_norm = 0.0;
};

// Target is the argmin of avg_phi (lowest index wins ties); d is the mean gap
// of the other modalities to the target; d_norm = clamp(d / n, 0, 1).
ModalityResamplePlan ModalityLevelPlan(std::span<const double> avg_phi,
                                       const MonotoneMap& f_m,
                                       int subset_size = 0);

// Z = max(1, round(fraction * population)), capped at population.
int SubsetSizeFromFraction(double fraction, std::size_t population);

// Z distinct indices drawn uniformly without replacement, in ascending order.
std::vector<std::size_t> DrawSubset(std::size_t population, std::size_t z,
                                    std::uint64_t seed);

// Per-modality mean phi, summed in index order.
std::vector<double> AverageContributions(
    std::span<const ContributionVector> vectors);

// Draws Z records with DrawSubset, valuates them exactly and averages.
std::vector<double> EstimateAverageContributions(
    std::span<const SubsetPredictionRecord> records, std::size_t z,
    std::uint64_t seed);

}  // namespace mmval

#endif  // MMVAL_SCHEDULERS_H_
