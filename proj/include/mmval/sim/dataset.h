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

#ifndef MMVAL_SIM_DATASET_H_
#define MMVAL_SIM_DATASET_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mmval/batch.h"

namespace mmval::sim {

enum class Heterogeneity {
  // Every sample of modality i uses separation s_i; modality 0 is strongest.
  kDatasetBiased,
  // Each sample picks one dominant modality uniformly at random; it uses the
  // largest s_i and every other modality the smallest.
  kSampleMixed,
};

// Gaussian class-conditional features. For modality i the class-c mean is
// s_i * u_{i,c}, where the u_{i,c} are seeded orthonormal directions, and the
// noise is isotropic with stddev `noise_stddev`. Separation is therefore the
// distance of every class mean from the origin in noise units.
struct SyntheticSpec {
  int classes = 4;
  int train_samples = 1000;
  int test_samples = 200;
  std::vector<int> feature_dims = {16, 16};
  std::vector<double> separation = {3.0, 0.5};
  double noise_stddev = 1.0;
  Heterogeneity mode = Heterogeneity::kDatasetBiased;
  std::uint64_t seed = 1;

  int modalities() const { return static_cast<int>(feature_dims.size()); }
  // Throws InvalidArgument on inconsistent or out-of-range fields.
  void Validate() const;
};

struct Split {
  std::vector<Eigen::MatrixXd> features;
  std::vector<int> labels;
  // Dominant modality per sample (sample-mixed) or 0 (dataset-biased).
  std::vector<int> dominant;

  int size() const { return static_cast<int>(labels.size()); }
  MultiModalBatch Rows(const std::vector<int>& indices) const;
  MultiModalBatch All() const;
};

struct Dataset {
  int classes = 0;
  std::vector<int> feature_dims;
  Split train;
  Split test;

  int modalities() const { return static_cast<int>(feature_dims.size()); }
};

// Deterministic given spec.seed.
Dataset GenerateDataset(const SyntheticSpec& spec);

}  // namespace mmval::sim

#endif  // MMVAL_SIM_DATASET_H_
