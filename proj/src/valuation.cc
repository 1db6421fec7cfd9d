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

#include "mmval/valuation.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "mmval/error.h"

namespace mmval {
namespace {

void CheckExactSize(int n) {
  if (n > kMaxExactModalities) {
    throw Error(ErrorCode::kTooManyModalities,
                "exact Shapley supports at most " +
                    std::to_string(kMaxExactModalities) + " modalities, got " +
                    std::to_string(n));
  }
  if (n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one modality");
  }
}

// weights[s] = s! (n-s-1)! / n!. Factorials up to 16! are exact in a double.
std::vector<double> SubsetWeights(int n) {
  std::vector<double> factorial(n + 1, 1.0);
  for (int k = 1; k <= n; ++k) factorial[k] = factorial[k - 1] * k;
  std::vector<double> weights(n);
  for (int s = 0; s < n; ++s) {
    weights[s] = factorial[s] * factorial[n - s - 1] / factorial[n];
  }
  return weights;
}

}  // namespace

ModalitySet::ModalitySet(std::vector<std::string> names)
    : names_(std::move(names)) {
  std::set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty() || !seen.insert(name).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "modality names must be nonempty and unique: \"" + name +
                      "\"");
    }
  }
}

ModalitySet ModalitySet::Anonymous(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("m" + std::to_string(i));
  return ModalitySet(std::move(names));
}

std::optional<int> ModalitySet::IndexOf(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

bool SubsetPredictionRecord::IsComplete() const {
  if (n < 1 || n > kMaxMaskModalities) return false;
  const std::uint32_t total = SubsetCount(n);
  if (predictions.size() != total - 1) return false;
  for (std::uint32_t bits = 1; bits < total; ++bits) {
    if (!predictions.contains(bits)) return false;
  }
  return true;
}

std::optional<int> SubsetPredictionRecord::PredictionFor(
    SubsetMask mask) const {
  const auto it = predictions.find(mask.bits());
  if (it == predictions.end()) return std::nullopt;
  return it->second;
}

std::string ContributionVector::MethodLabel() const {
  if (method == ShapleyMethod::kExact) return "exact";
  return "mc:" + std::to_string(permutations) + ":" + std::to_string(seed);
}

double Benefit(SubsetMask mask, const SubsetPredictionRecord& record) {
  if (mask.n() != record.n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mask over n=" + std::to_string(mask.n()) +
                    " applied to record with n=" + std::to_string(record.n));
  }
  if (mask.empty()) return 0.0;
  const auto predicted = record.PredictionFor(mask);
  if (!predicted) {
    throw Error(ErrorCode::kMissingSubset,
                "sample \"" + record.sample_id + "\" has no prediction for {" +
                    mask.Key() + "}");
  }
  return *predicted == record.true_label ? mask.cardinality() : 0.0;
}

double MarginalContribution(const SubsetPredictionRecord& record, int modality,
                            SubsetMask predecessors) {
  if (predecessors.contains(modality)) {
    throw Error(ErrorCode::kInvalidArgument,
                "modality " + std::to_string(modality) +
                    " is already among its predecessors");
  }
  return Benefit(predecessors.With(modality), record) -
         Benefit(predecessors, record);
}

std::vector<double> DenseBenefits(const SubsetPredictionRecord& record) {
  CheckExactSize(record.n);
  const std::uint32_t total = SubsetCount(record.n);
  std::vector<double> benefits(total, 0.0);
  for (std::uint32_t bits = 1; bits < total; ++bits) {
    benefits[bits] = Benefit(SubsetMask(bits, record.n), record);
  }
  return benefits;
}

BenefitOracle OracleFor(const SubsetPredictionRecord& record) {
  return [&record](SubsetMask mask) { return Benefit(mask, record); };
}

std::vector<double> ShapleyFromDenseBenefits(std::span<const double> benefits,
                                             int n) {
  CheckExactSize(n);
  const std::uint32_t total = SubsetCount(n);
  if (benefits.size() != total) {
    throw Error(ErrorCode::kDimensionMismatch,
                "benefit table has " + std::to_string(benefits.size()) +
                    " entries, expected " + std::to_string(total));
  }
  const std::vector<double> weights = SubsetWeights(n);
  std::vector<double> phi(n, 0.0);
  // Marginals are summed per coalition size in sorted order, so two
  // modalities with the same multiset of marginals get bit-identical values.
  std::vector<std::vector<double>> by_size(n);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t bit = std::uint32_t{1} << i;
    for (auto& bucket : by_size) bucket.clear();
    for (std::uint32_t s = 0; s < total; ++s) {
      if (s & bit) continue;
      const double marginal = benefits[s | bit] - benefits[s];
      if (marginal != 0.0) by_size[std::popcount(s)].push_back(marginal);
    }
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      std::sort(by_size[k].begin(), by_size[k].end());
      double bucket_sum = 0.0;
      for (const double marginal : by_size[k]) bucket_sum += marginal;
      sum += weights[k] * bucket_sum;
    }
    phi[i] = sum;
  }
  return phi;
}

ContributionVector ExactShapley(const SubsetPredictionRecord& record) {
  CheckExactSize(record.n);
  const std::vector<double> benefits = DenseBenefits(record);
  ContributionVector result;
  result.sample_id = record.sample_id;
  result.phi = ShapleyFromDenseBenefits(benefits, record.n);
  result.method = ShapleyMethod::kExact;
  result.grand_benefit = benefits.back();
  return result;
}

ContributionVector MonteCarloShapley(const BenefitOracle& oracle, int n, int m,
                                     std::uint64_t seed) {
  if (m < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least one permutation, got m=" + std::to_string(m));
  }
  if (n < 1 || n > kMaxMaskModalities) {
    throw Error(ErrorCode::kInvalidArgument,
                "modality count out of range: " + std::to_string(n));
  }
  std::mt19937_64 rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  // Welford running mean / M2 per modality.
  std::vector<double> mean(n, 0.0);
  std::vector<double> m2(n, 0.0);
  const double empty_value = oracle(SubsetMask::Empty(n));
  for (int t = 0; t < m; ++t) {
    std::shuffle(order.begin(), order.end(), rng);
    SubsetMask coalition = SubsetMask::Empty(n);
    double previous = empty_value;
    for (int modality : order) {
      coalition = coalition.With(modality);
      const double current = oracle(coalition);
      const double marginal = current - previous;
      previous = current;
      const double delta = marginal - mean[modality];
      mean[modality] += delta / (t + 1);
      m2[modality] += delta * (marginal - mean[modality]);
    }
  }

  ContributionVector result;
  result.phi = mean;
  result.method = ShapleyMethod::kMonteCarlo;
  result.permutations = m;
  result.seed = seed;
  result.grand_benefit = oracle(SubsetMask::Full(n));
  if (m >= 2) {
    std::vector<double> se(n);
    for (int i = 0; i < n; ++i) {
      se[i] = std::sqrt(m2[i] / (m - 1)) / std::sqrt(static_cast<double>(m));
    }
    result.std_error = std::move(se);
  }
  return result;
}

std::vector<MarginalViolation> CheckNonnegMarginals(
    const SubsetPredictionRecord& record) {
  const std::vector<double> benefits = DenseBenefits(record);
  const int n = record.n;
  std::vector<MarginalViolation> violations;
  for (std::uint32_t s = 0; s < SubsetCount(n); ++s) {
    for (int i = 0; i < n; ++i) {
      const std::uint32_t bit = std::uint32_t{1} << i;
      if (s & bit) continue;
      const double marginal = benefits[s | bit] - benefits[s];
      if (marginal < 0.0) {
        violations.push_back({i, SubsetMask(s, n), marginal});
      }
    }
  }
  return violations;
}

}  // namespace mmval
