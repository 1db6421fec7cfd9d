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

#ifndef MMVAL_MODULATION_H_
#define MMVAL_MODULATION_H_

#include <span>

namespace mmval {

// Coefficients that steer three existing two-modality balancing schemes by
// the contribution gap g = 1 - phi instead of their native signals.

inline constexpr double kDefaultOgmBeta = 0.1;

// g = 1 - s, no clamping.
inline double ContributionGap(double contribution) {
  return 1.0 - contribution;
}

// Mean gap over a set of contributions (a mini-batch or a whole dataset).
double MeanGap(std::span<const double> contributions);

// Gradient coefficient for one modality's encoder:
//   1 + tanh(alpha * beta * g)  if g > 0
//   1 + tanh(alpha * g)         otherwise.
// Throws NonPositiveHyperparam unless alpha > 0 and beta > 0.
double OgmGeCoefficient(double mean_gap, double alpha,
                        double beta = kDefaultOgmBeta);

struct BlendingWeights {
  double w_uv = 0.0;
  double w_u = 0.0;
  double w_v = 0.0;
  double rho = 0.0;
};

// Splits 1 - w_uv between the two uni-modal losses. The modality with the
// larger gap keeps the remainder; the other gets rho^alpha * (1 - w_uv) with
// rho = smaller gap / gap sum. Equal gaps split evenly.
// rho is floored at 0 when the smaller gap is negative. Throws DegenerateGaps
// when the gap sum is not positive in the asymmetric branch,
// InvalidArgument when w_uv lies outside [0, 1], NonPositiveHyperparam for
// alpha <= 0.
BlendingWeights GBlendingWeights(double w_uv, double mean_gap_u,
                                 double mean_gap_v, double alpha);

// Q = floor(lambda * tanh(alpha * |g_u - g_v|)).
int GreedyWindow(double mean_gap_u, double mean_gap_v, double lambda,
                 double alpha);

}  // namespace mmval

#endif  // MMVAL_MODULATION_H_
