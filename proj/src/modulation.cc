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

#include <algorithm>
#include <cmath>
#include <string>

#include "mmval/error.h"

namespace mmval {
namespace {

void RequirePositive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::kNonPositiveHyperparam,
                std::string(name) + " must be positive, got " +
                    std::to_string(value));
  }
}

}  // namespace

double MeanGap(std::span<const double> contributions) {
  if (contributions.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no contributions to average");
  }
  double sum = 0.0;
  for (double s : contributions) sum += ContributionGap(s);
  return sum / static_cast<double>(contributions.size());
}

double OgmGeCoefficient(double mean_gap, double alpha, double beta) {
  RequirePositive(alpha, "alpha");
  RequirePositive(beta, "beta");
  if (mean_gap > 0.0) return 1.0 + std::tanh(alpha * beta * mean_gap);
  return 1.0 + std::tanh(alpha * mean_gap);
}

BlendingWeights GBlendingWeights(double w_uv, double mean_gap_u,
                                 double mean_gap_v, double alpha) {
  RequirePositive(alpha, "alpha");
  if (!(w_uv >= 0.0 && w_uv <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "w_uv must lie in [0, 1], got " + std::to_string(w_uv));
  }
  BlendingWeights weights;
  weights.w_uv = w_uv;
  const double remainder = 1.0 - w_uv;
  if (mean_gap_u == mean_gap_v) {
    weights.w_u = remainder / 2.0;
    weights.w_v = remainder / 2.0;
    weights.rho = 0.5;
    return weights;
  }
  const double total = mean_gap_u + mean_gap_v;
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kDegenerateGaps,
                "gap sum must be positive with unequal gaps, got " +
                    std::to_string(total));
  }
  // A negative smaller gap (phi > 1) would make rho negative; the weaker
  // modality then takes the whole uni-modal share.
  if (mean_gap_u > mean_gap_v) {
    weights.rho = std::max(0.0, mean_gap_v / total);
    weights.w_v = std::pow(weights.rho, alpha) * remainder;
    weights.w_u = remainder - weights.w_v;
  } else {
    weights.rho = std::max(0.0, mean_gap_u / total);
    weights.w_u = std::pow(weights.rho, alpha) * remainder;
    weights.w_v = remainder - weights.w_u;
  }
  return weights;
}

int GreedyWindow(double mean_gap_u, double mean_gap_v, double lambda,
                 double alpha) {
  RequirePositive(lambda, "lambda");
  RequirePositive(alpha, "alpha");
  return static_cast<int>(
      std::floor(lambda * std::tanh(alpha * std::abs(mean_gap_u - mean_gap_v))));
}

}  // namespace mmval
