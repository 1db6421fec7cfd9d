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

#ifndef MMVAL_BATCH_H_
#define MMVAL_BATCH_H_

#include <vector>

#include <Eigen/Dense>

#include "mmval/subset_mask.h"

namespace mmval {

// Row-aligned features of a batch: features[i] holds modality i, one row per
// sample. All modalities share the same row count.
struct MultiModalBatch {
  std::vector<Eigen::MatrixXd> features;

  int modalities() const { return static_cast<int>(features.size()); }
  Eigen::Index rows() const {
    return features.empty() ? 0 : features.front().rows();
  }
};

// Keeps only `selected`; every other modality becomes exactly 0.0.
MultiModalBatch ApplyMasking(const MultiModalBatch& batch, int selected);

// Zeroes every modality outside `coalition`.
MultiModalBatch MaskToCoalition(const MultiModalBatch& batch,
                                SubsetMask coalition);

}  // namespace mmval

#endif  // MMVAL_BATCH_H_
