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

#ifndef MMVAL_SUBSET_MASK_H_
#define MMVAL_SUBSET_MASK_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace mmval {

// Widest coalition a mask can address. Exact Shapley is further capped at
// kMaxExactModalities.
inline constexpr int kMaxMaskModalities = 31;

// A coalition of modalities over a problem with `n` modalities. Bit i is set
// iff modality i belongs to the coalition.
class SubsetMask {
 public:
  SubsetMask() = default;
  // Throws InvalidArgument if n is out of range or bits >= 2^n.
  SubsetMask(std::uint32_t bits, int n);

  static SubsetMask Empty(int n) { return SubsetMask(0, n); }
  static SubsetMask Full(int n);
  static SubsetMask Single(int modality, int n);

  // Parses a canonical key such as "0,2". Indices must be strictly increasing
  // and below n; no whitespace is allowed. The empty key is rejected.
  static SubsetMask FromKey(std::string_view key, int n);

  std::uint32_t bits() const { return bits_; }
  int n() const { return n_; }
  int cardinality() const;
  bool empty() const { return bits_ == 0; }
  bool contains(int modality) const;

  SubsetMask With(int modality) const;
  SubsetMask Without(int modality) const;

  // Sorted comma-joined indices; "" for the empty mask.
  std::string Key() const;

  friend auto operator<=>(const SubsetMask&, const SubsetMask&) = default;

 private:
  std::uint32_t bits_ = 0;
  int n_ = 0;
};

inline std::uint32_t SubsetCount(int n) { return std::uint32_t{1} << n; }

}  // namespace mmval

#endif  // MMVAL_SUBSET_MASK_H_
