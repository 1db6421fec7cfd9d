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

#include <cmath>
#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mmval/error.h"
#include "test_util.h"

namespace mmval::theory {
namespace {

using ::testing::ElementsAre;

std::vector<bool> Correct(int n, std::initializer_list<std::uint32_t> bits) {
  std::vector<bool> c(1u << n, false);
  for (const auto b : bits) c[b] = true;
  return c;
}

std::vector<double> Values(const BenefitTable& t) {
  return {t.values().begin(), t.values().end()};
}

// Admissibility straight from the definition.
bool OracleAdmissible(int n, const std::vector<double>& v) {
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    for (int i = 0; i < n; ++i) {
      if (!((s >> i) & 1u) && v[s | (1u << i)] < v[s]) return false;
    }
  }
  return true;
}

TEST(BenefitTableTest, IndexEnumeration) {
  const BenefitTable t = BenefitTable::FromIndex(2, 0b101);
  EXPECT_TRUE(t.correct(1));
  EXPECT_FALSE(t.correct(2));
  EXPECT_TRUE(t.correct(3));
  EXPECT_THAT(Values(t), ElementsAre(0.0, 1.0, 0.0, 2.0));
  EXPECT_TRUE(t.full_benefit());
  const BenefitTable back = BenefitTable::FromRecord(t.ToRecord("x"));
  EXPECT_THAT(Values(back), ElementsAre(0.0, 1.0, 0.0, 2.0));
  EXPECT_THROW(BenefitTable::FromIndex(2, 8), Error);
}

TEST(PermutationShapleyTest, AgreesWithSubsetWeights) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 6;
    const auto record = testing::RandomRecord(n, rng);
    const auto table = BenefitTable::FromRecord(record);
    const auto perm = PermutationShapley(table.values(), n);
    const auto oracle = testing::OraclePermutationShapley(record);
    for (int i = 0; i < n; ++i) ASSERT_NEAR(perm[i], oracle[i], 1e-12);
  }
}

TEST(Corollary1Test, Examples) {
  // phi = (1.5, 0.5): bound for the weak modality is tight.
  const auto two = Corollary1BoundCheck(BenefitTable(2, Correct(2, {1, 3})));
  EXPECT_THAT(two.phi, ElementsAre(1.5, 0.5));
  EXPECT_EQ(two.leave_one_out_gain[1], 1.0);
  EXPECT_EQ(two.bound[1], 1.0);
  EXPECT_EQ(two.slack[1], 0.0);
  EXPECT_TRUE(two.holds());

  const auto three =
      Corollary1BoundCheck(BenefitTable(3, Correct(3, {1, 3, 5, 7})));
  EXPECT_EQ(three.leave_one_out_gain[1], 1.0);
  EXPECT_NEAR(three.bound[1], 1.5, 1e-12);
  EXPECT_TRUE(three.holds());

  for (int n = 1; n <= 4; ++n) {
    std::vector<bool> all(1u << n, true);
    const auto r = Corollary1BoundCheck(BenefitTable(n, all));
    for (int k = 0; k < n; ++k) {
      EXPECT_NEAR(r.phi[k], 1.0, 1e-12);
      EXPECT_EQ(r.leave_one_out_gain[k], 1.0);
    }
  }
}

TEST(Corollary1Test, RejectsInadmissibleOrUnrewardedTables) {
  try {
    Corollary1BoundCheck(BenefitTable(2, Correct(2, {2})));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInadmissibleTable);
  }
  EXPECT_THROW(Corollary1BoundCheck(BenefitTable(2, Correct(2, {}))), Error);
}

TEST(SweepTest, CountsMatchDirectEnumeration) {
  for (int n = 1; n <= 3; ++n) {
    const SweepReport report = ExhaustiveTableSweep(n);
    const std::uint64_t tables = 1ull << ((1u << n) - 1);
    EXPECT_EQ(report.tables, tables);
    std::uint64_t admissible = 0;
    std::uint64_t full = 0;
    for (std::uint64_t index = 0; index < tables; ++index) {
      std::vector<double> v(1u << n, 0.0);
      for (std::uint32_t s = 1; s < (1u << n); ++s) {
        if ((index >> (s - 1)) & 1u) v[s] = std::popcount(s);
      }
      if (OracleAdmissible(n, v)) {
        ++admissible;
        if (v.back() == n) ++full;
      }
    }
    EXPECT_EQ(report.admissible, admissible);
    EXPECT_EQ(report.inadmissible, tables - admissible);
    EXPECT_EQ(report.admissible_full_benefit, full);
    EXPECT_TRUE(report.ok());
    EXPECT_LE(report.max_efficiency_error, kEfficiencyTolerance);
    EXPECT_LE(report.max_equivalence_error, kEquivalenceTolerance);
  }
  EXPECT_EQ(ExhaustiveTableSweep(2).tables, 8u);
  EXPECT_EQ(ExhaustiveTableSweep(3).Summary(), "128 tables, 0 violations");
}

TEST(SweepTest, SingleModalityContributions) {
  for (std::uint64_t index = 0; index < 2; ++index) {
    const auto table = BenefitTable::FromIndex(1, index);
    const auto phi = PermutationShapley(table.values(), 1);
    EXPECT_EQ(phi[0], static_cast<double>(index));
  }
}

TEST(SweepTest, LowContributionShrinksBound) {
  for (int n = 2; n <= 3; ++n) {
    for (std::uint64_t index = 0; index < (1ull << ((1u << n) - 1)); ++index) {
      const auto table = BenefitTable::FromIndex(n, index);
      if (!table.admissible() || !table.full_benefit()) continue;
      const auto r = Corollary1BoundCheck(table);
      for (int k = 0; k < n; ++k) {
        if (r.phi[k] < 1.0) ASSERT_LT(r.bound[k], n);
      }
    }
  }
}

TEST(Corollary2Test, EnhancementRaisesContribution) {
  for (const int n : {2, 3}) {
    const Corollary2Report r = Corollary2ExpectationSim(n, 100000, 7);
    EXPECT_TRUE(r.PositiveAt3Sigma()) << r.estimate << " " << r.std_error;
    // Only the first position differs in expectation: 1/n.
    EXPECT_NEAR(r.estimate, 1.0 / n, 4 * r.std_error);
    EXPECT_EQ(r.analytic, 1.0 / n);
  }
}

TEST(Corollary2Test, ControlStaysAtZero) {
  for (const int n : {2, 3}) {
    const Corollary2Report r =
        Corollary2ExpectationSim(n, 100000, 8, /*enhance=*/false);
    EXPECT_TRUE(r.WithinThreeSigmaOfZero()) << r.estimate << " " << r.std_error;
    EXPECT_EQ(r.analytic, 0.0);
  }
}

TEST(Corollary2Test, Reproducible) {
  const auto a = Corollary2ExpectationSim(3, 20000, 99);
  const auto b = Corollary2ExpectationSim(3, 20000, 99);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_NE(a.estimate, Corollary2ExpectationSim(3, 20000, 100).estimate);
  EXPECT_THROW(Corollary2ExpectationSim(1, 100, 1), Error);
  EXPECT_THROW(Corollary2ExpectationSim(3, 0, 1), Error);
}

}  // namespace
}  // namespace mmval::theory
