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

#include "mmval/batch.h"

#include <string>

#include "mmval/error.h"

namespace mmval {

MultiModalBatch MaskToCoalition(const MultiModalBatch& batch,
                                SubsetMask coalition) {
  if (coalition.n() != batch.modalities()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "coalition over n=" + std::to_string(coalition.n()) +
                    " applied to a batch with " +
                    std::to_string(batch.modalities()) + " modalities");
  }
  MultiModalBatch masked = batch;
  for (int i = 0; i < batch.modalities(); ++i) {
    if (!coalition.contains(i)) masked.features[i].setZero();
  }
  return masked;
}

MultiModalBatch ApplyMasking(const MultiModalBatch& batch, int selected) {
  if (selected < 0 || selected >= batch.modalities()) {
    throw Error(ErrorCode::kInvalidArgument,
                "selected modality " + std::to_string(selected) +
                    " out of range");
  }
  return MaskToCoalition(batch,
                         SubsetMask::Single(selected, batch.modalities()));
}

}  // namespace mmval
