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

#include "mmval/theory.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "mmval/error.h"
#include "mmval/random.h"

namespace mmval::theory {
namespace {

constexpr int kMaxSweepModalities = 3;
constexpr int kMaxCorollary2Modalities = 8;
constexpr long long kTrialsPerChunk = 4096;

// Running mean and sum of squared deviations; chunks merge associatively.
struct Moments {
  long long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void Add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void Merge(const Moments& other) {
    if (other.count == 0) return;
    const long long total = count + other.count;
    const double delta = other.mean - mean;
    mean += delta * static_cast<double>(other.count) / total;
    m2 += other.m2 + delta * delta * static_cast<double>(count) *
                         static_cast<double>(other.count) / total;
    count = total;
  }
};

double Factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

BenefitTable::BenefitTable(int n, std::vector<bool> correct)
    : n_(n), correct_(std::move(correct)) {
  if (n < 1 || n > kMaxExactModalities) {
    throw Error(ErrorCode::kInvalidArgument,
                "benefit table needs 1 <= n <= 16, got " + std::to_string(n));
  }
  if (correct_.size() != SubsetCount(n)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "benefit table needs 2^n correctness entries");
  }
  correct_[0] = false;
  values_.assign(SubsetCount(n), 0.0);
  for (std::uint32_t bits = 1; bits < SubsetCount(n); ++bits) {
    values_[bits] = correct_[bits] ? std::popcount(bits) : 0.0;
  }
}

BenefitTable BenefitTable::FromIndex(int n, std::uint64_t index) {
  if (n < 1 || n > 6) {
    throw Error(ErrorCode::kInvalidArgument,
                "indexed tables support 1 <= n <= 6");
  }
  if ((index >> (SubsetCount(n) - 1)) != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "table index " + std::to_string(index) + " out of range for n=" +
                    std::to_string(n));
  }
  std::vector<bool> correct(SubsetCount(n), false);
  for (std::uint32_t bits = 1; bits < SubsetCount(n); ++bits) {
    correct[bits] = (index >> (bits - 1)) & 1u;
  }
  return BenefitTable(n, std::move(correct));
}

BenefitTable BenefitTable::FromRecord(const SubsetPredictionRecord& record) {
  std::vector<bool> correct(SubsetCount(record.n), false);
  for (std::uint32_t bits = 1; bits < SubsetCount(record.n); ++bits) {
    correct[bits] = Benefit(SubsetMask(bits, record.n), record) > 0.0;
  }
  return BenefitTable(record.n, std::move(correct));
}

bool BenefitTable::admissible() const {
  for (std::uint32_t s = 0; s < SubsetCount(n_); ++s) {
    for (int i = 0; i < n_; ++i) {
      const std::uint32_t bit = std::uint32_t{1} << i;
      if (!(s & bit) && values_[s | bit] < values_[s]) return false;
    }
  }
  return true;
}

bool BenefitTable::full_benefit() const { return values_.back() == n_; }

SubsetPredictionRecord BenefitTable::ToRecord(std::string sample_id) const {
  SubsetPredictionRecord record;
  record.sample_id = std::move(sample_id);
  record.true_label = 0;
  record.n = n_;
  for (std::uint32_t bits = 1; bits < SubsetCount(n_); ++bits) {
    record.predictions[bits] = correct_[bits] ? 0 : 1;
  }
  return record;
}

std::vector<double> PermutationShapley(std::span<const double> values, int n) {
  if (n < 1 || n > 10 || values.size() != SubsetCount(n)) {
    throw Error(ErrorCode::kInvalidArgument,
                "permutation enumeration needs 1 <= n <= 10 and 2^n values");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> total(n, 0.0);
  do {
    std::uint32_t coalition = 0;
    for (int modality : order) {
      const std::uint32_t next = coalition | (std::uint32_t{1} << modality);
      total[modality] += values[next] - values[coalition];
      coalition = next;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  const double permutations = Factorial(n);
  for (double& t : total) t /= permutations;
  return total;
}

Corollary1Report Corollary1BoundCheck(const BenefitTable& table) {
  if (!table.admissible()) {
    throw Error(ErrorCode::kInadmissibleTable,
                "table has a negative marginal contribution");
  }
  if (!table.full_benefit()) {
    throw Error(ErrorCode::kInadmissibleTable,
                "full-input prediction is wrong (v(N) != n)");
  }
  const int n = table.n();
  Corollary1Report report;
  report.n = n;
  report.phi = ShapleyFromDenseBenefits(table.values(), n);
  const std::uint32_t full = SubsetCount(n) - 1;
  for (int k = 0; k < n; ++k) {
    const double gain =
        table.value(full) - table.value(full & ~(std::uint32_t{1} << k));
    const double bound = n * report.phi[k];
    report.leave_one_out_gain.push_back(gain);
    report.bound.push_back(bound);
    report.slack.push_back(bound - gain);
    // Tight bounds are computed from rounded weights; allow for that.
    if (gain > bound + kEfficiencyTolerance) ++report.violations;
  }
  return report;
}

Corollary2Report Corollary2ExpectationSim(int n, long long trials,
                                          std::uint64_t seed, bool enhance) {
  if (n < 2 || n > kMaxCorollary2Modalities) {
    throw Error(ErrorCode::kInvalidArgument,
                "case-model simulation needs 2 <= n <= 8, got " +
                    std::to_string(n));
  }
  if (trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one trial");
  }
  // Permutations sharing a predecessor count are exchangeable under the
  // model, so only the position of k is enumerated.
  const double per_position = Factorial(n - 1);
  const double all_permutations = Factorial(n);
  const double first_position_gain = enhance ? 1.0 : 0.0;

  Moments total;
  const long long chunks = (trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
  for (long long chunk = 0; chunk < chunks; ++chunk) {
    std::mt19937_64 rng(DeriveSeed(seed, static_cast<std::uint64_t>(chunk)));
    std::uniform_int_distribution<int> pick_case(0, 8);
    const long long begin = chunk * kTrialsPerChunk;
    const long long end = std::min(trials, begin + kTrialsPerChunk);
    Moments moments;
    for (long long t = begin; t < end; ++t) {
      double sum = per_position * first_position_gain;
      for (int position = 1; position < n; ++position) {
        const double c = position + 1;
        const std::array<double, 3> outcomes = {0.0, 1.0, c};
        for (int p = 0; p < static_cast<int>(per_position); ++p) {
          const int which = pick_case(rng);
          sum += outcomes[which / 3] - outcomes[which % 3];
        }
      }
      moments.Add(sum / all_permutations);
    }
    total.Merge(moments);
  }

  Corollary2Report report;
  report.n = n;
  report.trials = trials;
  report.seed = seed;
  report.enhanced = enhance;
  report.estimate = total.mean;
  report.std_error =
      trials > 1 ? std::sqrt(total.m2 / (trials - 1) / trials) : 0.0;
  report.analytic = enhance ? 1.0 / n : 0.0;
  return report;
}

std::string SweepReport::Summary() const {
  std::ostringstream out;
  out << tables << " tables, " << corollary1_violations << " violations";
  return out.str();
}

SweepReport ExhaustiveTableSweep(int n) {
  if (n < 1 || n > kMaxSweepModalities) {
    throw Error(ErrorCode::kInvalidArgument,
                "exhaustive sweep supports 1 <= n <= 3, got " +
                    std::to_string(n));
  }
  SweepReport report;
  report.n = n;
  report.tables = std::uint64_t{1} << (SubsetCount(n) - 1);
  for (std::uint64_t index = 0; index < report.tables; ++index) {
    const BenefitTable table = BenefitTable::FromIndex(n, index);
    const std::vector<double> phi =
        ShapleyFromDenseBenefits(table.values(), n);
    const std::vector<double> reference = PermutationShapley(table.values(), n);

    const double efficiency_error =
        std::abs(std::accumulate(phi.begin(), phi.end(), 0.0) -
                 table.values().back());
    report.max_efficiency_error =
        std::max(report.max_efficiency_error, efficiency_error);
    if (efficiency_error > kEfficiencyTolerance) ++report.efficiency_failures;

    double equivalence_error = 0.0;
    for (int i = 0; i < n; ++i) {
      equivalence_error =
          std::max(equivalence_error, std::abs(phi[i] - reference[i]));
    }
    report.max_equivalence_error =
        std::max(report.max_equivalence_error, equivalence_error);
    if (equivalence_error > kEquivalenceTolerance) {
      ++report.equivalence_failures;
    }

    if (!table.admissible()) {
      ++report.inadmissible;
      continue;
    }
    ++report.admissible;
    if (table.full_benefit()) {
      ++report.admissible_full_benefit;
      if (!Corollary1BoundCheck(table).holds()) ++report.corollary1_violations;
    }
  }
  return report;
}

}  // namespace mmval::theory
