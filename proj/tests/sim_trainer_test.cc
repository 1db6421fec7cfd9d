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

#include "mmval/sim/trainer.h"

#include <numeric>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mmval/error.h"
#include "test_util.h"

namespace mmval::sim {
namespace {

using ::testing::StartsWith;

Dataset SmallDataset(std::uint64_t seed, int modalities = 2) {
  SyntheticSpec spec;
  spec.classes = 4;
  spec.train_samples = 240;
  spec.test_samples = 120;
  spec.feature_dims.assign(modalities, 8);
  spec.separation = {3.0, 1.0, 0.8};
  spec.separation.resize(modalities);
  spec.seed = seed;
  return GenerateDataset(spec);
}

TrainConfig SmallConfig(Strategy strategy, std::uint64_t seed) {
  TrainConfig config;
  config.epochs = 8;
  config.warmup_epochs = 3;
  config.learning_rate = 0.01;
  config.strategy = strategy;
  config.seed = seed;
  return config;
}

long long Sum(const std::vector<long long>& v) {
  return std::accumulate(v.begin(), v.end(), 0LL);
}

TEST(TrainerTest, LossDecreasesOverFirstEpochsOnDefaultSpec) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    SyntheticSpec spec;
    spec.seed = seed;
    const Dataset data = GenerateDataset(spec);
    TrainConfig config;
    config.epochs = 6;
    config.seed = seed;
    const TrainRunReport report = Train(data, ModelConfig{}, config);
    for (int e = 1; e < 5; ++e) {
      EXPECT_LT(report.epochs[e].train_loss, report.epochs[e - 1].train_loss)
          << "seed " << seed << " epoch " << e + 1;
    }
  }
}

TEST(TrainerTest, ContributionsSumToFullInputAccuracy) {
  for (const Strategy s : {Strategy::kBaseline, Strategy::kSampleLevel,
                           Strategy::kModalityLevel}) {
    for (const int n : {2, 3}) {
      const Dataset data = SmallDataset(3, n);
      const TrainRunReport report = Train(data, ModelConfig{}, SmallConfig(s, 3));
      for (const EpochRecord& e : report.epochs) {
        const double sum = std::accumulate(e.avg_phi.begin(), e.avg_phi.end(), 0.0);
        ASSERT_NEAR(sum, n * e.train_accuracy, 1e-9);
      }
    }
  }
}

TEST(TrainerTest, ValuationMatchesIndependentShapley) {
  const Dataset data = SmallDataset(4, 3);
  const MultiModalModel model(ModelConfig{}, data.feature_dims, data.classes, 9);
  const Valuation v = ValuateSplit(model, data.train);
  std::vector<int> rows(data.train.size());
  std::iota(rows.begin(), rows.end(), 0);
  const auto records = PredictionRecords(model, data.train, rows);
  ASSERT_EQ(records.size(), v.contributions.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto oracle = testing::OraclePermutationShapley(records[r]);
    for (int i = 0; i < 3; ++i) {
      ASSERT_NEAR(v.contributions[r].phi[i], oracle[i], 1e-12);
    }
  }
  EXPECT_DOUBLE_EQ(v.accuracy, Accuracy(model, data.train));
}

TEST(TrainerTest, BitIdenticalAcrossRuns) {
  const Dataset data = SmallDataset(5);
  for (const Strategy s : {Strategy::kSampleLevel, Strategy::kNaiveResample,
                           Strategy::kModalityLevel}) {
    const TrainRunReport a = Train(data, ModelConfig{}, SmallConfig(s, 5));
    const TrainRunReport b = Train(data, ModelConfig{}, SmallConfig(s, 5));
    std::ostringstream ca;
    std::ostringstream cb;
    WriteTrajectoryCsv(a, ca);
    WriteTrajectoryCsv(b, cb);
    EXPECT_EQ(ca.str(), cb.str()) << StrategyName(s);
  }
}

TEST(TrainerTest, NoExtraStepsBeforeWarmupEnds) {
  const Dataset data = SmallDataset(6);
  const TrainConfig config = SmallConfig(Strategy::kSampleLevel, 6);
  const TrainRunReport report = Train(data, ModelConfig{}, config);
  ASSERT_EQ(report.epochs.size(), 8u);
  for (int e = 0; e < config.warmup_epochs; ++e) {
    EXPECT_EQ(Sum(report.epochs[e].resample_counts), 0) << e;
  }
  EXPECT_GT(report.TotalResamples(), 0);
  const TrainRunReport baseline =
      Train(data, ModelConfig{}, SmallConfig(Strategy::kBaseline, 6));
  EXPECT_EQ(baseline.TotalResamples(), 0);
  // Identical until the first re-sample epoch.
  for (int e = 0; e < config.warmup_epochs; ++e) {
    EXPECT_EQ(baseline.epochs[e].train_loss, report.epochs[e].train_loss);
  }
}

TEST(TrainerTest, MatchedVolumeBaselines) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Dataset data = SmallDataset(seed);
    const int first = SmallConfig(Strategy::kBaseline, seed).warmup_epochs;
    const auto sample =
        Train(data, ModelConfig{}, SmallConfig(Strategy::kSampleLevel, seed));
    const auto naive =
        Train(data, ModelConfig{}, SmallConfig(Strategy::kNaiveResample, seed));
    const auto reversed = Train(
        data, ModelConfig{}, SmallConfig(Strategy::kReversedResample, seed));
    // All three plan from the same snapshot at the first re-sample epoch.
    const long long volume = Sum(sample.epochs[first].resample_counts);
    ASSERT_GT(volume, 0);
    EXPECT_EQ(Sum(naive.epochs[first].resample_counts), volume);
    EXPECT_EQ(Sum(reversed.epochs[first].resample_counts), volume);
    // Sample-level targets the weak modality, reversed the strong one.
    EXPECT_GT(sample.epochs[first].resample_counts[1],
              sample.epochs[first].resample_counts[0]);
    EXPECT_GT(reversed.epochs[first].resample_counts[0],
              reversed.epochs[first].resample_counts[1]);
  }
}

TEST(TrainerTest, FixedRateCountsFlaggedPairs) {
  const Dataset data = SmallDataset(7);
  TrainConfig config = SmallConfig(Strategy::kFixedRate, 7);
  config.fixed_rate = 2;
  const auto fixed = Train(data, ModelConfig{}, config);
  for (const auto& e : fixed.epochs) {
    for (const long long c : e.resample_counts) ASSERT_EQ(c % 2, 0);
  }
  EXPECT_GT(fixed.TotalResamples(), 0);
}

TEST(TrainerTest, ModalityLevelTargetsWeakModality) {
  const Dataset data = SmallDataset(8);
  const auto report =
      Train(data, ModelConfig{}, SmallConfig(Strategy::kModalityLevel, 8));
  long long weak = 0;
  long long strong = 0;
  for (const auto& e : report.epochs) {
    strong += e.resample_counts[0];
    weak += e.resample_counts[1];
  }
  EXPECT_GT(weak, 0);
  EXPECT_EQ(strong, 0);
}

TEST(TrainerTest, TrajectoryCsvHeader) {
  const Dataset data = SmallDataset(9);
  TrainConfig config = SmallConfig(Strategy::kBaseline, 9);
  config.epochs = 4;
  std::ostringstream out;
  WriteTrajectoryCsv(Train(data, ModelConfig{}, config), out);
  EXPECT_THAT(out.str(),
              StartsWith("epoch,train_loss,train_accuracy,test_accuracy,"
                         "phi_0,phi_1,resample_0,resample_1\n1,"));
  const std::string csv = out.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(TrainerTest, ConfigValidation) {
  TrainConfig config;
  config.warmup_epochs = config.epochs;
  EXPECT_THROW(config.Validate(), Error);
  config = TrainConfig{};
  config.learning_rate = 0.0;
  EXPECT_THROW(config.Validate(), Error);
  config = TrainConfig{};
  config.momentum = 1.0;
  EXPECT_THROW(config.Validate(), Error);
  EXPECT_EQ(ParseStrategy("reversed_resample"), Strategy::kReversedResample);
  EXPECT_THROW(ParseStrategy("reverse"), Error);
}

TEST(TrainerTest, DivergenceIsReported) {
  const Dataset data = SmallDataset(10);
  TrainConfig config = SmallConfig(Strategy::kBaseline, 10);
  config.learning_rate = 1e6;
  try {
    Train(data, ModelConfig{}, config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteLoss);
  }
}

ModulationConfig Scheme(ModulationScheme scheme) {
  ModulationConfig m;
  m.scheme = scheme;
  return m;
}

TEST(ModulatedTest, GBlendingWeightsSumToOne) {
  const Dataset data = SmallDataset(11);
  const auto report = RunModulated(data, ModelConfig{},
                                   SmallConfig(Strategy::kBaseline, 11),
                                   Scheme(ModulationScheme::kGBlending));
  ASSERT_FALSE(report.modulation.empty());
  for (const auto& event : report.modulation) {
    ASSERT_EQ(event.values.size(), 3u);
    EXPECT_NEAR(event.values[0], 0.4, 1e-12);
    EXPECT_NEAR(event.values[0] + event.values[1] + event.values[2], 1.0,
                1e-12);
  }
}

TEST(ModulatedTest, OgmGeNeutralOnBalancedData) {
  SyntheticSpec spec;
  spec.classes = 4;
  spec.train_samples = 320;
  spec.test_samples = 100;
  spec.feature_dims = {8, 8};
  spec.separation = {2.0, 2.0};
  spec.seed = 12;
  const Dataset data = GenerateDataset(spec);
  TrainConfig config = SmallConfig(Strategy::kBaseline, 12);
  config.warmup_epochs = 0;
  const auto report = RunModulated(data, ModelConfig{}, config,
                                   Scheme(ModulationScheme::kOgmGe));
  int considered = 0;
  int neutral = 0;
  for (const auto& event : report.modulation) {
    if (event.epoch <= 3) continue;
    ++considered;
    if (event.values[0] >= 0.9 && event.values[0] <= 1.1 &&
        event.values[1] >= 0.9 && event.values[1] <= 1.1) {
      ++neutral;
    }
  }
  ASSERT_GT(considered, 0);
  EXPECT_GE(neutral, 0.8 * considered);
}

TEST(ModulatedTest, GreedyRecordsWindowPerEpoch) {
  const Dataset data = SmallDataset(13);
  const TrainConfig config = SmallConfig(Strategy::kBaseline, 13);
  const auto report = RunModulated(data, ModelConfig{}, config,
                                   Scheme(ModulationScheme::kGreedy));
  long long windows = 0;
  for (const auto& event : report.modulation) {
    ASSERT_EQ(event.values.size(), 1u);
    ASSERT_GE(event.values[0], 0.0);
    ASSERT_LE(event.values[0], 10.0);
    windows += static_cast<long long>(event.values[0]);
  }
  EXPECT_GT(windows, 0);
  EXPECT_GT(report.TotalResamples(), 0);
}

TEST(ModulatedTest, OgmGeDoesNotLowerWeakContributionOnBiasedSpec) {
  double baseline = 0.0;
  double modulated = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SyntheticSpec spec;
    spec.classes = 10;
    spec.train_samples = 500;
    spec.test_samples = 200;
    spec.feature_dims = {256, 16};
    spec.separation = {3.0, 1.5};
    spec.seed = seed;
    const Dataset data = GenerateDataset(spec);
    TrainConfig config;
    config.learning_rate = 0.003;
    config.seed = seed;
    baseline += Train(data, ModelConfig{}, config).final().avg_phi[1];
    modulated += RunModulated(data, ModelConfig{}, config,
                              Scheme(ModulationScheme::kOgmGe))
                     .final()
                     .avg_phi[1];
  }
  EXPECT_GE(modulated, baseline);
}

TEST(ModulatedTest, RequiresTwoModalities) {
  const Dataset data = SmallDataset(14, 3);
  try {
    RunModulated(data, ModelConfig{}, SmallConfig(Strategy::kBaseline, 14),
                 Scheme(ModulationScheme::kOgmGe));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedModalityCount);
  }
}

}  // namespace
}  // namespace mmval::sim
