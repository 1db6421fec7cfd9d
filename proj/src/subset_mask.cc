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

#include "mmval/subset_mask.h"

#include <bit>
#include <charconv>

#include "mmval/error.h"

namespace mmval {
namespace {

void CheckModality(int modality, int n) {
  if (modality < 0 || modality >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                "modality index " + std::to_string(modality) +
                    " out of range for n=" + std::to_string(n));
  }
}

}  // namespace

SubsetMask::SubsetMask(std::uint32_t bits, int n) : bits_(bits), n_(n) {
  if (n < 0 || n > kMaxMaskModalities) {
    throw Error(ErrorCode::kInvalidArgument,
                "modality count " + std::to_string(n) + " outside [0, " +
                    std::to_string(kMaxMaskModalities) + "]");
  }
  if (bits >= SubsetCount(n)) {
    throw Error(ErrorCode::kInvalidArgument,
                "mask bits " + std::to_string(bits) + " do not fit n=" +
                    std::to_string(n));
  }
}

SubsetMask SubsetMask::Full(int n) { return SubsetMask(SubsetCount(n) - 1, n); }

SubsetMask SubsetMask::Single(int modality, int n) {
  CheckModality(modality, n);
  return SubsetMask(std::uint32_t{1} << modality, n);
}

SubsetMask SubsetMask::FromKey(std::string_view key, int n) {
  if (key.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty subset key");
  }
  std::uint32_t bits = 0;
  int previous = -1;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    const std::size_t comma = key.find(',', pos);
    const std::string_view token =
        key.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                        : comma - pos);
    int index = -1;
    const auto [end, ec] =
        std::from_chars(token.data(), token.data() + token.size(), index);
    if (token.empty() || ec != std::errc() ||
        end != token.data() + token.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "malformed subset key \"" + std::string(key) + "\"");
    }
    if (index <= previous) {
      throw Error(ErrorCode::kInvalidArgument,
                  "subset key \"" + std::string(key) +
                      "\" is not strictly increasing");
    }
    if (index >= n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "subset key \"" + std::string(key) + "\" exceeds n=" +
                      std::to_string(n));
    }
    bits |= std::uint32_t{1} << index;
    previous = index;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return SubsetMask(bits, n);
}

int SubsetMask::cardinality() const { return std::popcount(bits_); }

bool SubsetMask::contains(int modality) const {
  CheckModality(modality, n_);
  return (bits_ >> modality) & 1u;
}

SubsetMask SubsetMask::With(int modality) const {
  CheckModality(modality, n_);
  return SubsetMask(bits_ | (std::uint32_t{1} << modality), n_);
}

SubsetMask SubsetMask::Without(int modality) const {
  CheckModality(modality, n_);
  return SubsetMask(bits_ & ~(std::uint32_t{1} << modality), n_);
}

std::string SubsetMask::Key() const {
  std::string key;
  for (int i = 0; i < n_; ++i) {
    if ((bits_ >> i) & 1u) {
      if (!key.empty()) key += ',';
      key += std::to_string(i);
    }
  }
  return key;
}

}  // namespace mmval
