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

#include <cmath>
#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mmval/error.h"
#include "test_util.h"

namespace mmval {
namespace {

using ::mmval::testing::MakeRecord;
using ::testing::ElementsAre;

std::vector<int> Counts(double phi0, double phi1, const MonotoneMap& f) {
  const std::vector<double> phi = {phi0, phi1};
  return SampleCounts(phi, f);
}

TEST(MonotoneMapTest, ParseAndEvaluate) {
  EXPECT_EQ(MonotoneMap::Parse("identity")(0.3), 0.3);
  EXPECT_EQ(MonotoneMap::Parse("linear:2")(0.5), 1.0);
  EXPECT_NEAR(MonotoneMap::Parse("tanh")(0.4), 0.379948962255225, 1e-15);
  EXPECT_NEAR(MonotoneMap::Parse("tanh:3")(0.5), 3 * std::tanh(0.5), 1e-15);
  EXPECT_NEAR(MonotoneMap::Parse("power:1.5")(0.25), 0.125, 1e-15);
  EXPECT_NEAR(MonotoneMap::Parse("power:2,2")(0.5), 0.5, 1e-15);
  const MonotoneMap step = MonotoneMap::Parse("step:0.2=1;0.6=3");
  EXPECT_EQ(step(0.1), 0.0);
  EXPECT_EQ(step(0.2), 1.0);
  EXPECT_EQ(step(0.9), 3.0);
  for (const char* bad : {"", "cubic", "linear:-1", "linear:x", "power:0",
                          "step:0.5=2;0.1=3", "step:0.1=3;0.5=2"}) {
    EXPECT_THROW(MonotoneMap::Parse(bad), Error) << bad;
  }
}

TEST(MonotoneMapTest, ToStringRoundTrips) {
  for (const auto& maps : {ShippedSampleMaps(), ShippedModalityMaps()}) {
    for (const MonotoneMap& f : maps) {
      const MonotoneMap g = MonotoneMap::Parse(f.ToString());
      for (double x = -1.0; x <= 2.0; x += 0.125) EXPECT_EQ(f(x), g(x));
    }
  }
}

TEST(SampleCountsTest, Examples) {
  const MonotoneMap f = MonotoneMap::Linear(2.0);
  EXPECT_THAT(Counts(0.5, 1.5, f), ElementsAre(1, 0));
  EXPECT_THAT(Counts(1.2, 1.0, f), ElementsAre(0, 0));
  EXPECT_THAT(Counts(0.0, -0.5, f), ElementsAre(2, 3));
  // Rounding noise just below 1 is not a low contribution.
  EXPECT_THAT(Counts(1.0 - 1e-13, 0.9999, f), ElementsAre(0, 1));
}

TEST(SampleCountsTest, ZeroAtOrAboveOneForShippedMaps) {
  for (const MonotoneMap& f : ShippedSampleMaps()) {
    for (double phi = 1.0; phi <= 3.0; phi += 0.01) {
      ASSERT_THAT(Counts(phi, phi, f), ElementsAre(0, 0)) << f.ToString();
    }
  }
}

TEST(SampleCountsTest, MonotoneInGapForShippedMaps) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, 1.0);
  for (const MonotoneMap& f : ShippedSampleMaps()) {
    for (int trial = 0; trial < 2000; ++trial) {
      double a = u(rng);
      double b = u(rng);
      if (a > b) std::swap(a, b);
      ASSERT_GE(Counts(a, 0, f)[0], Counts(b, 0, f)[0])
          << f.ToString() << " a=" << a << " b=" << b;
    }
  }
}

TEST(SampleLevelPlanTest, OnlyPositiveEntries) {
  std::vector<ContributionVector> vectors(3);
  vectors[0] = {"a", {1.5, 0.5}};
  vectors[1] = {"b", {1.0, 1.0}};
  vectors[2] = {"c", {0.0, 2.0}};
  const SampleResamplePlan plan =
      SampleLevelPlan(vectors, MonotoneMap::Linear(2.0));
  EXPECT_EQ(plan.entries.size(), 2u);
  EXPECT_THAT(plan.entries.at("a"), ElementsAre(0, 1));
  EXPECT_THAT(plan.entries.at("c"), ElementsAre(2, 0));
  EXPECT_EQ(plan.TotalCount(), 3);
  EXPECT_THAT(plan.CountsPerModality(), ElementsAre(2, 1));

  vectors[1].phi = {1.0, 1.0, 1.0};
  EXPECT_THROW(SampleLevelPlan(vectors, MonotoneMap::Linear(2.0)), Error);
}

TEST(SampleLevelPlanTest, EmptyWhenAllContributionsAtLeastOne) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(1.0, 2.0);
  std::vector<ContributionVector> vectors;
  for (int i = 0; i < 50; ++i) {
    vectors.push_back({std::to_string(i), {u(rng), u(rng), u(rng)}});
  }
  for (const MonotoneMap& f : ShippedSampleMaps()) {
    EXPECT_TRUE(SampleLevelPlan(vectors, f).entries.empty());
  }
}

TEST(ModalityLevelPlanTest, Examples) {
  const std::vector<double> avg = {1.4, 0.6};
  const ModalityResamplePlan p =
      ModalityLevelPlan(avg, MonotoneMap::Parse("identity"), 7);
  EXPECT_EQ(p.target_modality, 1);
  EXPECT_NEAR(p.d, 0.8, 1e-12);
  EXPECT_NEAR(p.d_norm, 0.4, 1e-12);
  EXPECT_NEAR(p.probability, 0.4, 1e-12);
  EXPECT_EQ(p.subset_size, 7);
  EXPECT_NEAR(ModalityLevelPlan(avg, MonotoneMap::Tanh()).probability,
              0.3799, 5e-5);

  const std::vector<double> even = {1.0, 1.0};
  for (const MonotoneMap& f : ShippedModalityMaps()) {
    const ModalityResamplePlan q = ModalityLevelPlan(even, f);
    EXPECT_EQ(q.target_modality, 0);
    EXPECT_EQ(q.d, 0.0);
    EXPECT_EQ(q.probability, 0.0);
  }
}

TEST(ModalityLevelPlanTest, ThreeModalities) {
  const std::vector<double> avg = {1.5, 0.3, 1.2};
  const ModalityResamplePlan p = ModalityLevelPlan(avg, MonotoneMap::Linear(1));
  EXPECT_EQ(p.target_modality, 1);
  EXPECT_NEAR(p.d, 1.05, 1e-12);
  EXPECT_NEAR(p.d_norm, 0.35, 1e-12);
}

TEST(ModalityLevelPlanTest, Properties) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 2 + trial % 4;
    std::uniform_real_distribution<double> u(-n, n);
    std::vector<double> avg(n);
    for (double& a : avg) a = u(rng);
    for (const MonotoneMap& f : ShippedModalityMaps()) {
      const ModalityResamplePlan p = ModalityLevelPlan(avg, f);
      ASSERT_GE(p.probability, 0.0);
      ASSERT_LE(p.probability, 1.0);
      ASSERT_GE(p.d_norm, 0.0);
      ASSERT_LE(p.d_norm, 1.0);
      std::vector<double> shifted = avg;
      const double c = u(rng);
      for (double& a : shifted) a += c;
      ASSERT_EQ(ModalityLevelPlan(shifted, f).target_modality,
                p.target_modality);
    }
  }
}

TEST(ModalityLevelPlanTest, TiesGoToLowestIndex) {
  const std::vector<double> avg = {1.2, 0.4, 0.4};
  EXPECT_EQ(ModalityLevelPlan(avg, MonotoneMap::Linear(1)).target_modality, 1);
}

TEST(SubsetDrawTest, SizeAndDeterminism) {
  EXPECT_EQ(SubsetSizeFromFraction(0.2, 1000), 200);
  EXPECT_EQ(SubsetSizeFromFraction(0.0001, 10), 1);
  EXPECT_EQ(SubsetSizeFromFraction(1.0, 10), 10);
  const auto a = DrawSubset(100, 20, 5);
  EXPECT_EQ(a, DrawSubset(100, 20, 5));
  EXPECT_NE(a, DrawSubset(100, 20, 6));
  ASSERT_EQ(a.size(), 20u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  EXPECT_LT(a.back(), 100u);
}

TEST(EstimateAverageTest, FullSubsetEqualsPopulationMean) {
  std::mt19937_64 rng(24);
  std::vector<SubsetPredictionRecord> records;
  for (int i = 0; i < 40; ++i) records.push_back(testing::RandomRecord(3, rng));
  std::vector<double> mean(3, 0.0);
  for (const auto& r : records) {
    const auto phi = testing::OraclePermutationShapley(r);
    for (int k = 0; k < 3; ++k) mean[k] += phi[k] / records.size();
  }
  const auto estimate = EstimateAverageContributions(records, 40, 1);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(estimate[k], mean[k], 1e-12);

  const std::vector<SubsetPredictionRecord> same(30,
                                                 MakeRecord(2, {0, 1, 0, 1}));
  EXPECT_THAT(EstimateAverageContributions(same, 5, 3), ElementsAre(1.5, 0.5));
}

TEST(EstimateAverageTest, TwentyPercentTracksPopulation) {
  // Audio-dominant population: audio alone is usually right, visual alone
  // usually wrong.
  std::mt19937_64 rng(25);
  std::bernoulli_distribution audio_ok(0.85);
  std::bernoulli_distribution visual_ok(0.3);
  std::bernoulli_distribution both_ok(0.9);
  std::vector<SubsetPredictionRecord> records;
  for (int i = 0; i < 1000; ++i) {
    records.push_back(
        MakeRecord(2, {false, audio_ok(rng), visual_ok(rng), both_ok(rng)}));
  }
  std::vector<double> full(2, 0.0);
  for (const auto& r : records) {
    const auto phi = testing::OraclePermutationShapley(r);
    full[0] += phi[0] / 1000;
    full[1] += phi[1] / 1000;
  }
  int close = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto est = EstimateAverageContributions(records, 200, seed);
    if (std::abs(est[0] - full[0]) <= 0.15 && std::abs(est[1] - full[1]) <= 0.15) {
      ++close;
    }
  }
  EXPECT_GE(close, 95);
}

}  // namespace
}  // namespace mmval
