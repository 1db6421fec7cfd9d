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

#include "mmval/modulation.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "mmval/error.h"

namespace mmval {
namespace {

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(OgmGeTest, Examples) {
  EXPECT_NEAR(OgmGeCoefficient(0.3, 1.0, 0.1), 1.029991, 1e-6);
  EXPECT_NEAR(OgmGeCoefficient(-0.2, 1.0), 0.802625, 1e-6);
  EXPECT_EQ(OgmGeCoefficient(0.0, 1.0), 1.0);
}

TEST(OgmGeTest, MonotoneOnEachBranch) {
  for (const double beta : {0.1, 0.5, 1.0}) {
    double previous = OgmGeCoefficient(-3.0, 1.0, beta);
    for (double g = -2.99; g <= 3.0; g += 0.01) {
      const double k = OgmGeCoefficient(g, 1.0, beta);
      if (std::abs(g) > 0.005) ASSERT_GE(k, previous) << g;
      previous = k;
    }
  }
  // Continuous at 0 only for beta = 1.
  const double eps = 1e-6;
  EXPECT_NEAR(OgmGeCoefficient(eps, 2.0, 1.0), OgmGeCoefficient(-eps, 2.0, 1.0),
              1e-5);
  EXPECT_GT(OgmGeCoefficient(0.5, 1.0, 0.1) - OgmGeCoefficient(-1e-9, 1.0, 0.1),
            0.0);
}

TEST(OgmGeTest, RejectsNonPositiveHyperparameters) {
  EXPECT_EQ(CodeOf([] { OgmGeCoefficient(0.1, 0.0); }),
            ErrorCode::kNonPositiveHyperparam);
  EXPECT_EQ(CodeOf([] { OgmGeCoefficient(0.1, 1.0, -0.1); }),
            ErrorCode::kNonPositiveHyperparam);
}

TEST(GBlendingTest, Examples) {
  const BlendingWeights a = GBlendingWeights(0.4, 0.6, 0.2, 1.0);
  EXPECT_NEAR(a.rho, 0.25, 1e-12);
  EXPECT_NEAR(a.w_u, 0.45, 1e-9);
  EXPECT_NEAR(a.w_v, 0.15, 1e-9);
  EXPECT_NEAR(a.w_uv + a.w_u + a.w_v, 1.0, 1e-12);

  const BlendingWeights b = GBlendingWeights(0.4, 0.6, 0.2, 2.0);
  EXPECT_NEAR(b.w_v, 0.0375, 1e-12);
  EXPECT_NEAR(b.w_u, 0.5625, 1e-12);

  const BlendingWeights tie = GBlendingWeights(0.4, 0.3, 0.3, 1.0);
  EXPECT_DOUBLE_EQ(tie.w_u, 0.3);
  EXPECT_DOUBLE_EQ(tie.w_v, 0.3);

  // Mirror image.
  const BlendingWeights c = GBlendingWeights(0.4, 0.2, 0.6, 1.0);
  EXPECT_NEAR(c.w_u, 0.15, 1e-12);
  EXPECT_NEAR(c.w_v, 0.45, 1e-12);
}

TEST(GBlendingTest, WeightsSumToOneAndStayNonnegative) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> gap(-1.0, 2.0);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  std::uniform_real_distribution<double> alpha(1.0, 4.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const double gu = gap(rng);
    const double gv = gap(rng);
    if (gu != gv && gu + gv <= 0.0) continue;
    const BlendingWeights b = GBlendingWeights(w(rng), gu, gv, alpha(rng));
    ASSERT_NEAR(b.w_uv + b.w_u + b.w_v, 1.0, 1e-12);
    ASSERT_GE(b.w_u, 0.0);
    ASSERT_GE(b.w_v, 0.0);
    ASSERT_GE(b.rho, 0.0);
    ASSERT_LE(b.rho, 0.5);
  }
}

TEST(GBlendingTest, Errors) {
  EXPECT_EQ(CodeOf([] { GBlendingWeights(0.4, -0.5, 0.1, 1.0); }),
            ErrorCode::kDegenerateGaps);
  EXPECT_EQ(CodeOf([] { GBlendingWeights(1.5, 0.5, 0.1, 1.0); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { GBlendingWeights(0.4, 0.5, 0.1, 0.0); }),
            ErrorCode::kNonPositiveHyperparam);
  // Negative smaller gap with a positive sum floors rho at 0.
  const BlendingWeights b = GBlendingWeights(0.4, 0.8, -0.2, 1.0);
  EXPECT_EQ(b.rho, 0.0);
  EXPECT_EQ(b.w_v, 0.0);
  EXPECT_NEAR(b.w_u, 0.6, 1e-12);
}

TEST(GreedyTest, Examples) {
  EXPECT_EQ(GreedyWindow(0.8, 0.5, 10.0, 2.0), 5);
  EXPECT_EQ(GreedyWindow(0.3, 0.3, 10.0, 2.0), 0);
  EXPECT_EQ(GreedyWindow(0.1, 0.6, 10.0, 1.0), 4);
}

TEST(GreedyTest, NondecreasingAndBounded) {
  for (const double lambda : {1.0, 7.5, 10.0, 50.0}) {
    int previous = 0;
    for (double delta = 0.0; delta <= 5.0; delta += 0.001) {
      const int q = GreedyWindow(delta, 0.0, lambda, 2.0);
      ASSERT_GE(q, previous);
      ASSERT_LE(q, lambda);
      previous = q;
    }
  }
  EXPECT_THROW(GreedyWindow(0.5, 0.1, 0.0, 1.0), Error);
  EXPECT_THROW(GreedyWindow(0.5, 0.1, 1.0, -1.0), Error);
}

TEST(MeanGapTest, Average) {
  const std::vector<double> phi = {0.5, 1.5, 0.25};
  EXPECT_DOUBLE_EQ(MeanGap(phi), (0.5 - 0.5 + 0.75) / 3);
  EXPECT_EQ(ContributionGap(1.25), -0.25);
}

}  // namespace
}  // namespace mmval
