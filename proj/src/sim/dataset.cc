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

#include "mmval/sim/dataset.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mmval/error.h"

namespace mmval::sim {
namespace {

// Columns are the class directions of one modality.
Eigen::MatrixXd ClassDirections(int dim, int classes, std::mt19937_64& rng) {
  std::normal_distribution<double> gaussian(0.0, 1.0);
  Eigen::MatrixXd raw(dim, classes);
  for (int c = 0; c < classes; ++c) {
    for (int r = 0; r < dim; ++r) raw(r, c) = gaussian(rng);
  }
  if (dim >= classes) {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    return qr.householderQ() * Eigen::MatrixXd::Identity(dim, classes);
  }
  // Too few dimensions for orthogonality; fall back to unit vectors.
  return raw.colwise().normalized();
}

Split Sample(const SyntheticSpec& spec,
             const std::vector<Eigen::MatrixXd>& directions, int count,
             std::mt19937_64& rng) {
  const int n = spec.modalities();
  const auto [weak_it, strong_it] =
      std::minmax_element(spec.separation.begin(), spec.separation.end());
  std::uniform_int_distribution<int> pick_class(0, spec.classes - 1);
  std::uniform_int_distribution<int> pick_modality(0, n - 1);
  std::normal_distribution<double> noise(0.0, spec.noise_stddev);

  Split split;
  split.labels.resize(count);
  split.dominant.resize(count, 0);
  for (int i = 0; i < n; ++i) {
    split.features.emplace_back(count, spec.feature_dims[i]);
  }
  for (int row = 0; row < count; ++row) {
    const int label = pick_class(rng);
    split.labels[row] = label;
    if (spec.mode == Heterogeneity::kSampleMixed) {
      split.dominant[row] = pick_modality(rng);
    }
    for (int i = 0; i < n; ++i) {
      double scale = spec.separation[i];
      if (spec.mode == Heterogeneity::kSampleMixed) {
        scale = i == split.dominant[row] ? *strong_it : *weak_it;
      }
      for (int col = 0; col < spec.feature_dims[i]; ++col) {
        split.features[i](row, col) =
            scale * directions[i](col, label) + noise(rng);
      }
    }
  }
  return split;
}

}  // namespace

void SyntheticSpec::Validate() const {
  const auto fail = [](const std::string& message) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic spec: " + message);
  };
  if (classes < 2) fail("need at least two classes");
  if (train_samples < 1 || test_samples < 1) fail("splits must be nonempty");
  if (feature_dims.empty()) fail("need at least one modality");
  if (separation.size() != feature_dims.size()) {
    fail("separation and feature_dims differ in length");
  }
  for (int dim : feature_dims) {
    if (dim < 1) fail("feature dims must be positive");
  }
  for (double s : separation) {
    if (!(s > 0.0) || !std::isfinite(s)) fail("separations must be positive");
  }
  if (!(noise_stddev > 0.0)) fail("noise stddev must be positive");
  if (mode == Heterogeneity::kDatasetBiased &&
      *std::max_element(separation.begin(), separation.end()) !=
          separation.front()) {
    fail("dataset-biased mode expects modality 0 to have the largest s");
  }
}

MultiModalBatch Split::Rows(const std::vector<int>& indices) const {
  MultiModalBatch batch;
  for (const auto& modality : features) {
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(indices.size()),
                         modality.cols());
    for (std::size_t r = 0; r < indices.size(); ++r) {
      rows.row(static_cast<Eigen::Index>(r)) = modality.row(indices[r]);
    }
    batch.features.push_back(std::move(rows));
  }
  return batch;
}

MultiModalBatch Split::All() const { return MultiModalBatch{features}; }

Dataset GenerateDataset(const SyntheticSpec& spec) {
  spec.Validate();
  std::mt19937_64 rng(spec.seed);
  std::vector<Eigen::MatrixXd> directions;
  for (int dim : spec.feature_dims) {
    directions.push_back(ClassDirections(dim, spec.classes, rng));
  }
  Dataset dataset;
  dataset.classes = spec.classes;
  dataset.feature_dims = spec.feature_dims;
  dataset.train = Sample(spec, directions, spec.train_samples, rng);
  dataset.test = Sample(spec, directions, spec.test_samples, rng);
  return dataset;
}

}  // namespace mmval::sim
