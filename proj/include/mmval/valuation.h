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

#ifndef MMVAL_VALUATION_H_
#define MMVAL_VALUATION_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmval/subset_mask.h"

namespace mmval {

inline constexpr int kMaxExactModalities = 16;

// Named modalities of one problem instance. Index i is the position in the
// list; names must be unique.
class ModalitySet {
 public:
  explicit ModalitySet(std::vector<std::string> names);
  // Default names "m0", "m1", ...
  static ModalitySet Anonymous(int n);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int index) const { return names_.at(index); }
  std::optional<int> IndexOf(const std::string& name) const;

 private:
  std::vector<std::string> names_;
};

// Ground-truth label of one sample plus the label predicted for each
// evaluated coalition. The empty coalition never carries a prediction.
struct SubsetPredictionRecord {
  std::string sample_id;
  int true_label = 0;
  int n = 0;
  std::map<std::uint32_t, int> predictions;

  // True iff all 2^n - 1 nonempty masks are present.
  bool IsComplete() const;
  std::optional<int> PredictionFor(SubsetMask mask) const;
};

enum class ShapleyMethod { kExact, kMonteCarlo };

struct ContributionVector {
  std::string sample_id;
  std::vector<double> phi;
  ShapleyMethod method = ShapleyMethod::kExact;
  // Monte Carlo metadata; zero for exact vectors.
  int permutations = 0;
  std::uint64_t seed = 0;
  // Per-modality standard error of the MC mean. Absent for exact vectors and
  // for MC runs with a single permutation, where it is undefined.
  std::optional<std::vector<double>> std_error;
  double grand_benefit = 0.0;

  int n() const { return static_cast<int>(phi.size()); }
  // "exact" or "mc:<m>:<seed>".
  std::string MethodLabel() const;
};

// Characteristic function over coalitions. Only the correctness benefit below
// ships, but callers may plug any total function of the mask.
using BenefitOracle = std::function<double(SubsetMask)>;

// |C| if the coalition's prediction equals the label, else 0. The empty mask
// is worth 0 unconditionally. Throws MissingSubset for absent masks.
double Benefit(SubsetMask mask, const SubsetPredictionRecord& record);

// v(predecessors + i) - v(predecessors). May be negative.
double MarginalContribution(const SubsetPredictionRecord& record, int modality,
                            SubsetMask predecessors);

// Dense table of v indexed by mask bits (size 2^n, entry 0 is v(empty)).
std::vector<double> DenseBenefits(const SubsetPredictionRecord& record);

BenefitOracle OracleFor(const SubsetPredictionRecord& record);

// Shapley values from a dense benefit table using the subset-weighted form
//   phi_i = sum_{S not containing i} |S|!(n-|S|-1)!/n! * (v(S+i) - v(S)).
std::vector<double> ShapleyFromDenseBenefits(std::span<const double> benefits,
                                             int n);

ContributionVector ExactShapley(const SubsetPredictionRecord& record);

// Averages permutation marginals over m seeded uniform permutations.
ContributionVector MonteCarloShapley(const BenefitOracle& oracle, int n, int m,
                                     std::uint64_t seed);

struct MarginalViolation {
  int modality = 0;
  SubsetMask predecessors;
  double marginal = 0.0;
};

// Every (i, S) with v(S + i) < v(S), ordered by S bits then i.
std::vector<MarginalViolation> CheckNonnegMarginals(
    const SubsetPredictionRecord& record);

}  // namespace mmval

#endif  // MMVAL_VALUATION_H_
