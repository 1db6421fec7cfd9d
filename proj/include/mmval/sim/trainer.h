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

#ifndef MMVAL_SIM_TRAINER_H_
#define MMVAL_SIM_TRAINER_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mmval/schedulers.h"
#include "mmval/sim/dataset.h"
#include "mmval/sim/model.h"
#include "mmval/valuation.h"

namespace mmval::sim {

enum class Strategy {
  kBaseline,
  // Per-sample counts ceil(f_s(1 - phi)) of uni-modal re-training.
  kSampleLevel,
  // Dataset-level target modality re-sampled with probability f_m(d_norm).
  kModalityLevel,
  // Same volume as sample-level, spread uniformly over samples and modalities.
  kNaiveResample,
  // Same volume as sample-level, spent on each sample's strongest modality.
  kReversedResample,
  // Constant count for every (sample, modality) with phi < 1.
  kFixedRate,
};

std::string_view StrategyName(Strategy strategy);
// Accepts the names above in snake case ("sample_level", ...).
Strategy ParseStrategy(std::string_view name);

struct TrainConfig {
  int epochs = 30;
  int warmup_epochs = 5;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  Strategy strategy = Strategy::kBaseline;
  MonotoneMap f_s = DefaultSampleMap();
  MonotoneMap f_m = MonotoneMap::Linear(1.0);
  // Fraction of the training set valuated for the modality-level estimate.
  double subset_fraction = 0.2;
  int fixed_rate = 1;
  // Learning-rate multiplier for re-sample and re-balancing steps.
  double resample_lr_scale = 1.0;
  std::uint64_t seed = 1;

  void Validate() const;
};

enum class ModulationScheme { kOgmGe, kGBlending, kGreedy };

std::string_view SchemeName(ModulationScheme scheme);
ModulationScheme ParseScheme(std::string_view name);

struct ModulationConfig {
  ModulationScheme scheme = ModulationScheme::kOgmGe;
  double ogm_alpha = 1.0;
  double ogm_beta = 0.1;
  // Joint-loss weight, supplied externally.
  double blending_w_uv = 0.4;
  double blending_alpha = 1.0;
  double greedy_lambda = 10.0;
  double greedy_alpha = 2.0;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  // Full-input accuracy of the epoch-end snapshot.
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  // Mean exact phi over all training samples at epoch end.
  std::vector<double> avg_phi;
  // Extra (re-sample or re-balancing) items trained during this epoch.
  std::vector<long long> resample_counts;
};

// One coefficient update of a modulation scheme: (k_u, k_v) per batch for
// OGM-GE, (w_uv, w_u, w_v) per epoch for G-Blending, (Q) per epoch for Greedy.
struct ModulationEvent {
  int epoch = 0;
  int step = 0;
  std::vector<double> values;
};

struct TrainRunReport {
  std::vector<EpochRecord> epochs;
  std::vector<ModulationEvent> modulation;

  const EpochRecord& final() const { return epochs.back(); }
  long long TotalResamples() const;
};

// Per-sample exact contributions of a model on a split, obtained from
// zero-masked forward passes over all nonempty coalitions.
struct Valuation {
  std::vector<ContributionVector> contributions;
  std::vector<double> avg_phi;
  double accuracy = 0.0;  // full-input
};

Valuation ValuateSplit(const MultiModalModel& model, const Split& split);

// Subset prediction records of the given rows, for external valuation.
std::vector<SubsetPredictionRecord> PredictionRecords(
    const MultiModalModel& model, const Split& split,
    const std::vector<int>& rows);

double Accuracy(const MultiModalModel& model, const Split& split);

// Warm-up, then per-epoch valuation driving the strategy's extra steps in the
// following epoch. Deterministic given the dataset and configs. Throws
// NonFiniteLoss if training diverges.
TrainRunReport Train(const Dataset& dataset, const ModelConfig& model_config,
                     const TrainConfig& config);

// Same loop, but coefficients from the modulation adapters steer training in
// place of re-sampling. Two-modality datasets only.
TrainRunReport RunModulated(const Dataset& dataset,
                            const ModelConfig& model_config,
                            const TrainConfig& config,
                            const ModulationConfig& modulation);

// Header: epoch,train_loss,train_accuracy,test_accuracy,phi_0..,resample_0..
void WriteTrajectoryCsv(const TrainRunReport& report, std::ostream& out);

}  // namespace mmval::sim

#endif  // MMVAL_SIM_TRAINER_H_
