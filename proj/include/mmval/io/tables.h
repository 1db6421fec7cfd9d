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

#ifndef MMVAL_IO_TABLES_H_
#define MMVAL_IO_TABLES_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mmval/schedulers.h"
#include "mmval/valuation.h"

namespace mmval::io {

// Header: sample_id,phi_0,...,phi_{n-1},grand_benefit,method
// Reals use %.17g so a read-back reproduces every double exactly. Sample ids
// containing ',', '"' or a newline are quoted.
void WriteContributionsCsv(std::span<const ContributionVector> vectors,
                           std::ostream& out);

// Throws ParseError on malformed input and InconsistentModalityCount if a
// row's width disagrees with the header. Monte Carlo rows get their
// permutation count and seed back from the method label.
std::vector<ContributionVector> ReadContributionsCsv(std::istream& in);
std::vector<ContributionVector> ReadContributionsCsvFile(
    const std::string& path);

// Header: sample_id,modality,count. One row per positive count, samples in
// plan order, modalities ascending.
void WriteSamplePlanCsv(const SampleResamplePlan& plan, std::ostream& out);

// Header: target_modality,probability,subset_size,d,d_norm. One row.
void WriteModalityPlanCsv(const ModalityResamplePlan& plan, std::ostream& out);

// %.17g.
std::string FormatReal(double value);

}  // namespace mmval::io

#endif  // MMVAL_IO_TABLES_H_
