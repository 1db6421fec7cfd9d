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

#ifndef MMVAL_THEORY_H_
#define MMVAL_THEORY_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mmval/subset_mask.h"
#include "mmval/valuation.h"

namespace mmval::theory {

// Correctness of every nonempty coalition of an n-modality sample, with the
// benefit v(C) = |C| on correct coalitions and 0 otherwise.
class BenefitTable {
 public:
  // correct[bits] for bits in [1, 2^n); entry 0 is ignored.
  BenefitTable(int n, std::vector<bool> correct);

  // Table number `index` in the enumeration of all 2^(2^n - 1) tables: bit
  // (bits - 1) of index says whether coalition `bits` is correct.
  static BenefitTable FromIndex(int n, std::uint64_t index);
  static BenefitTable FromRecord(const SubsetPredictionRecord& record);

  int n() const { return n_; }
  bool correct(std::uint32_t bits) const { return correct_[bits]; }
  double value(std::uint32_t bits) const { return values_[bits]; }
  std::span<const double> values() const { return values_; }

  // All marginal contributions v(S + i) - v(S) are >= 0.
  bool admissible() const;
  // v(N) = n, i.e. the full-input prediction is correct.
  bool full_benefit() const;

  // Record with label 0 whose coalitions predict 0 when correct, 1 otherwise.
  SubsetPredictionRecord ToRecord(std::string sample_id) const;

 private:
  int n_;
  std::vector<bool> correct_;
  std::vector<double> values_;
};

// Brute-force average of marginals over all n! permutations. Independent of
// the subset-weighted path in ShapleyFromDenseBenefits; used as its oracle.
std::vector<double> PermutationShapley(std::span<const double> values, int n);

struct Corollary1Report {
  int n = 0;
  std::vector<double> phi;
  // v(N) - v(N \ k) per modality.
  std::vector<double> leave_one_out_gain;
  // n * phi_k per modality.
  std::vector<double> bound;
  // bound - gain; negative means violated.
  std::vector<double> slack;
  int violations = 0;

  bool holds() const { return violations == 0; }
};

// Checks v(N) - v(N \ k) <= n * phi_k for every k. Throws InadmissibleTable
// if the table has a negative marginal or v(N) != n.
Corollary1Report Corollary1BoundCheck(const BenefitTable& table);

struct Corollary2Report {
  int n = 0;
  long long trials = 0;
  std::uint64_t seed = 0;
  bool enhanced = true;
  double estimate = 0.0;
  double std_error = 0.0;
  // Value implied by the case model: 1/n when enhanced, else 0.
  double analytic = 0.0;

  bool PositiveAt3Sigma() const { return estimate > 3.0 * std_error; }
  bool WithinThreeSigmaOfZero() const {
    return estimate <= 3.0 * std_error && estimate >= -3.0 * std_error;
  }
};

// Monte Carlo over the equal-probability case model for marginal benefits.
// Every permutation of each trial draws one of the nine (after, before)
// marginal pairs over {0, 1, c} uniformly, where c - 1 is the number of
// predecessors; a permutation that starts with modality k instead takes the
// single-modality gain, forced to 0 -> 1 when `enhance` is set and to no
// change otherwise. The trial statistic is phi'_k - phi_k.
// Requires 2 <= n <= 8 and trials >= 1.
Corollary2Report Corollary2ExpectationSim(int n, long long trials,
                                          std::uint64_t seed,
                                          bool enhance = true);

struct SweepReport {
  int n = 0;
  std::uint64_t tables = 0;
  std::uint64_t efficiency_failures = 0;
  std::uint64_t equivalence_failures = 0;
  std::uint64_t admissible = 0;
  std::uint64_t inadmissible = 0;
  std::uint64_t admissible_full_benefit = 0;
  std::uint64_t corollary1_violations = 0;
  double max_efficiency_error = 0.0;
  double max_equivalence_error = 0.0;

  bool ok() const {
    return efficiency_failures == 0 && equivalence_failures == 0 &&
           corollary1_violations == 0;
  }
  std::string Summary() const;
};

inline constexpr double kEfficiencyTolerance = 1e-9;
inline constexpr double kEquivalenceTolerance = 1e-12;

// Enumerates every table for 1 <= n <= 3 and runs the efficiency,
// permutation-equivalence and bound checks on each.
SweepReport ExhaustiveTableSweep(int n);

}  // namespace mmval::theory

#endif  // MMVAL_THEORY_H_
