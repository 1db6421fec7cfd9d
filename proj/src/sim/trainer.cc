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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "mmval/error.h"
#include "mmval/modulation.h"
#include "mmval/random.h"

namespace mmval::sim {
namespace {

enum SeedStream : std::uint64_t {
  kInitStream = 1,
  kShuffleStream = 2,
  kResampleStream = 3,
  kSubsetStream = 1000,
};

// One extra training item: a training row with only `modality` kept.
struct ResampleItem {
  int row;
  int modality;
};

MultiModalBatch MaskedRows(const Split& split,
                           std::span<const ResampleItem> items) {
  std::vector<int> rows;
  rows.reserve(items.size());
  for (const auto& item : items) rows.push_back(item.row);
  MultiModalBatch batch = split.Rows(rows);
  for (std::size_t r = 0; r < items.size(); ++r) {
    for (int i = 0; i < batch.modalities(); ++i) {
      if (i != items[r].modality) {
        batch.features[i].row(static_cast<Eigen::Index>(r)).setZero();
      }
    }
  }
  return batch;
}

std::vector<int> LabelsOf(const Split& split, std::span<const int> rows) {
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (int row : rows) labels.push_back(split.labels[row]);
  return labels;
}

int Strongest(std::span<const double> phi) {
  return static_cast<int>(std::max_element(phi.begin(), phi.end()) -
                          phi.begin());
}

const TrainConfig& Validated(const TrainConfig& config) {
  config.Validate();
  return config;
}

// Shared mechanics of the re-sampling and modulated loops.
class Session {
 public:
  Session(const Dataset& dataset, const ModelConfig& model_config,
          const TrainConfig& config)
      : dataset_(dataset),
        config_(Validated(config)),
        model_(model_config, dataset.feature_dims, dataset.classes,
               DeriveSeed(config.seed, kInitStream)),
        optimizer_(config.learning_rate, config.momentum),
        shuffle_rng_(DeriveSeed(config.seed, kShuffleStream)),
        resample_rng_(DeriveSeed(config.seed, kResampleStream)) {
    if (dataset.train.size() == 0) {
      throw Error(ErrorCode::kEmptyDataset, "training split is empty");
    }
  }

  MultiModalModel& model() { return model_; }
  std::mt19937_64& resample_rng() { return resample_rng_; }
  int modalities() const { return dataset_.modalities(); }
  const Split& train() const { return dataset_.train; }

  std::vector<int> ShuffledOrder() {
    std::vector<int> order(static_cast<std::size_t>(train().size()));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), shuffle_rng_);
    return order;
  }

  double Step(const MultiModalBatch& batch, std::span<const int> labels,
              const LossWeights& weights, std::span<const double> scales,
              double lr_scale, int epoch) {
    Tensors gradient;
    const double loss = model_.Loss(batch, labels, weights, &gradient);
    if (!std::isfinite(loss)) {
      std::ostringstream message;
      message << "loss became " << loss << " in epoch " << epoch + 1
              << " (learning rate " << config_.learning_rate << ")";
      throw Error(ErrorCode::kNonFiniteLoss, message.str());
    }
    optimizer_.Step(model_.parameters(), gradient, scales, lr_scale);
    return loss;
  }

  // Trains the extra items in shuffled minibatches; returns counts per
  // modality.
  std::vector<long long> TrainExtra(std::vector<ResampleItem> items,
                                    const LossWeights& weights, int epoch) {
    std::vector<long long> counts(modalities(), 0);
    std::shuffle(items.begin(), items.end(), resample_rng_);
    for (std::size_t begin = 0; begin < items.size();
         begin += static_cast<std::size_t>(config_.batch_size)) {
      const std::size_t end = std::min(
          items.size(), begin + static_cast<std::size_t>(config_.batch_size));
      const std::span<const ResampleItem> chunk(items.data() + begin,
                                                end - begin);
      std::vector<int> rows;
      for (const auto& item : chunk) {
        rows.push_back(item.row);
        ++counts[item.modality];
      }
      Step(MaskedRows(train(), chunk), LabelsOf(train(), rows), weights, {},
           config_.resample_lr_scale, epoch);
    }
    return counts;
  }

  EpochRecord Record(int epoch, double train_loss,
                     std::vector<long long> resample_counts,
                     const Valuation& valuation) const {
    EpochRecord record;
    record.epoch = epoch + 1;
    record.train_loss = train_loss;
    record.train_accuracy = valuation.accuracy;
    record.test_accuracy = Accuracy(model_, dataset_.test);
    record.avg_phi = valuation.avg_phi;
    record.resample_counts = std::move(resample_counts);
    return record;
  }

  // Whether the valuation after `epoch` should drive the next epoch.
  bool Schedules(int epoch) const {
    return epoch + 1 >= config_.warmup_epochs && epoch + 1 < config_.epochs;
  }

 private:
  const Dataset& dataset_;
  const TrainConfig& config_;
  MultiModalModel model_;
  MomentumSgd optimizer_;
  std::mt19937_64 shuffle_rng_;
  std::mt19937_64 resample_rng_;
};

std::vector<ResampleItem> SampleLevelItems(const Valuation& valuation,
                                           const MonotoneMap& f_s) {
  std::vector<ResampleItem> items;
  for (std::size_t row = 0; row < valuation.contributions.size(); ++row) {
    const auto counts = SampleCounts(valuation.contributions[row].phi, f_s);
    for (std::size_t j = 0; j < counts.size(); ++j) {
      for (int c = 0; c < counts[j]; ++c) {
        items.push_back({static_cast<int>(row), static_cast<int>(j)});
      }
    }
  }
  return items;
}

std::vector<ResampleItem> PlanItems(Session& session, const TrainConfig& config,
                                    const Valuation& valuation, int epoch) {
  const int n = session.modalities();
  const int samples = session.train().size();
  std::vector<ResampleItem> items;
  switch (config.strategy) {
    case Strategy::kBaseline:
      break;
    case Strategy::kSampleLevel:
      items = SampleLevelItems(valuation, config.f_s);
      break;
    case Strategy::kFixedRate:
      for (int row = 0; row < samples; ++row) {
        const auto& phi = valuation.contributions[row].phi;
        for (int j = 0; j < n; ++j) {
          if (phi[j] < 1.0 - kContributionTolerance) {
            for (int c = 0; c < config.fixed_rate; ++c) items.push_back({row, j});
          }
        }
      }
      break;
    case Strategy::kNaiveResample: {
      const std::size_t volume = SampleLevelItems(valuation, config.f_s).size();
      std::uniform_int_distribution<int> pick_row(0, samples - 1);
      std::uniform_int_distribution<int> pick_modality(0, n - 1);
      for (std::size_t v = 0; v < volume; ++v) {
        const int row = pick_row(session.resample_rng());
        items.push_back({row, pick_modality(session.resample_rng())});
      }
      break;
    }
    case Strategy::kReversedResample:
      for (const auto& item : SampleLevelItems(valuation, config.f_s)) {
        items.push_back(
            {item.row, Strongest(valuation.contributions[item.row].phi)});
      }
      break;
    case Strategy::kModalityLevel: {
      if (n < 2) {
        throw Error(ErrorCode::kSingleModality,
                    "modality-level re-sampling needs two modalities");
      }
      std::vector<int> all(static_cast<std::size_t>(samples));
      std::iota(all.begin(), all.end(), 0);
      const auto records = PredictionRecords(session.model(), session.train(), all);
      const int z = SubsetSizeFromFraction(config.subset_fraction,
                                           records.size());
      const std::vector<double> estimate = EstimateAverageContributions(
          records, static_cast<std::size_t>(z),
          DeriveSeed(config.seed, kSubsetStream + epoch));
      const ModalityResamplePlan plan = ModalityLevelPlan(estimate, config.f_m, z);
      std::bernoulli_distribution draw(plan.probability);
      for (int row = 0; row < samples; ++row) {
        if (draw(session.resample_rng())) {
          items.push_back({row, plan.target_modality});
        }
      }
      break;
    }
  }
  return items;
}

std::vector<double> EncoderScales(const MultiModalModel& model,
                                  std::span<const double> per_modality) {
  std::vector<double> scales;
  for (const auto& info : model.parameter_info()) {
    scales.push_back(info.owner == ParameterOwner::kEncoder
                         ? per_modality[info.modality]
                         : 1.0);
  }
  return scales;
}

}  // namespace

std::string_view StrategyName(Strategy strategy) {
  switch (strategy) {
    case Strategy::kBaseline:
      return "baseline";
    case Strategy::kSampleLevel:
      return "sample_level";
    case Strategy::kModalityLevel:
      return "modality_level";
    case Strategy::kNaiveResample:
      return "naive_resample";
    case Strategy::kReversedResample:
      return "reversed_resample";
    case Strategy::kFixedRate:
      return "fixed_rate";
  }
  return "unknown";
}

Strategy ParseStrategy(std::string_view name) {
  for (Strategy s : {Strategy::kBaseline, Strategy::kSampleLevel,
                     Strategy::kModalityLevel, Strategy::kNaiveResample,
                     Strategy::kReversedResample, Strategy::kFixedRate}) {
    if (name == StrategyName(s)) return s;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown strategy \"" + std::string(name) + "\"");
}

std::string_view SchemeName(ModulationScheme scheme) {
  switch (scheme) {
    case ModulationScheme::kOgmGe:
      return "ogm-ge";
    case ModulationScheme::kGBlending:
      return "g-blending";
    case ModulationScheme::kGreedy:
      return "greedy";
  }
  return "unknown";
}

ModulationScheme ParseScheme(std::string_view name) {
  for (ModulationScheme s : {ModulationScheme::kOgmGe,
                             ModulationScheme::kGBlending,
                             ModulationScheme::kGreedy}) {
    if (name == SchemeName(s)) return s;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown modulation scheme \"" + std::string(name) + "\"");
}

void TrainConfig::Validate() const {
  const auto fail = [](const std::string& message) {
    throw Error(ErrorCode::kInvalidArgument, "train config: " + message);
  };
  if (epochs < 1) fail("epochs must be positive");
  if (warmup_epochs < 0 || warmup_epochs >= epochs) {
    fail("warm-up must be shorter than training");
  }
  if (batch_size < 1) fail("batch size must be positive");
  if (!(learning_rate > 0.0)) fail("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum must be in [0, 1)");
  if (!(subset_fraction > 0.0 && subset_fraction <= 1.0)) {
    fail("subset fraction must be in (0, 1]");
  }
  if (fixed_rate < 0) fail("fixed rate must be nonnegative");
  if (!(resample_lr_scale > 0.0)) fail("re-sample lr scale must be positive");
}

long long TrainRunReport::TotalResamples() const {
  long long total = 0;
  for (const auto& epoch : epochs) {
    for (long long c : epoch.resample_counts) total += c;
  }
  return total;
}

std::vector<SubsetPredictionRecord> PredictionRecords(
    const MultiModalModel& model, const Split& split,
    const std::vector<int>& rows) {
  const int n = model.modalities();
  if (n > kMaxExactModalities) {
    throw Error(ErrorCode::kTooManyModalities,
                "valuation needs at most 16 modalities");
  }
  const MultiModalBatch batch = split.Rows(rows);
  std::vector<SubsetPredictionRecord> records(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    records[r].sample_id = std::to_string(rows[r]);
    records[r].true_label = split.labels[rows[r]];
    records[r].n = n;
  }
  for (std::uint32_t bits = 1; bits < SubsetCount(n); ++bits) {
    const std::vector<int> predicted =
        model.Predict(MaskToCoalition(batch, SubsetMask(bits, n)));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      records[r].predictions.emplace_hint(records[r].predictions.end(), bits,
                                          predicted[r]);
    }
  }
  return records;
}

Valuation ValuateSplit(const MultiModalModel& model, const Split& split) {
  std::vector<int> rows(static_cast<std::size_t>(split.size()));
  std::iota(rows.begin(), rows.end(), 0);
  const auto records = PredictionRecords(model, split, rows);
  Valuation valuation;
  int correct = 0;
  for (const auto& record : records) {
    valuation.contributions.push_back(ExactShapley(record));
    if (valuation.contributions.back().grand_benefit > 0.0) ++correct;
  }
  valuation.avg_phi = AverageContributions(valuation.contributions);
  valuation.accuracy = static_cast<double>(correct) / split.size();
  return valuation;
}

double Accuracy(const MultiModalModel& model, const Split& split) {
  const std::vector<int> predicted = model.Predict(split.All());
  int correct = 0;
  for (int r = 0; r < split.size(); ++r) {
    if (predicted[r] == split.labels[r]) ++correct;
  }
  return static_cast<double>(correct) / split.size();
}

TrainRunReport Train(const Dataset& dataset, const ModelConfig& model_config,
                     const TrainConfig& config) {
  Session session(dataset, model_config, config);
  const LossWeights joint_only;
  TrainRunReport report;
  std::vector<ResampleItem> pending;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<int> order = session.ShuffledOrder();
    double loss_sum = 0.0;
    int steps = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(
          order.size(), begin + static_cast<std::size_t>(config.batch_size));
      const std::vector<int> rows(order.begin() + begin, order.begin() + end);
      loss_sum += session.Step(dataset.train.Rows(rows),
                               LabelsOf(dataset.train, rows), joint_only, {},
                               1.0, epoch);
      ++steps;
    }
    std::vector<long long> counts =
        session.TrainExtra(std::move(pending), joint_only, epoch);
    pending.clear();

    const Valuation valuation = ValuateSplit(session.model(), dataset.train);
    report.epochs.push_back(
        session.Record(epoch, loss_sum / steps, std::move(counts), valuation));
    if (session.Schedules(epoch)) {
      pending = PlanItems(session, config, valuation, epoch);
    }
  }
  return report;
}

TrainRunReport RunModulated(const Dataset& dataset,
                            const ModelConfig& model_config,
                            const TrainConfig& config,
                            const ModulationConfig& modulation) {
  if (dataset.modalities() != 2) {
    throw Error(ErrorCode::kUnsupportedModalityCount,
                "modulation schemes are defined for two modalities, got " +
                    std::to_string(dataset.modalities()));
  }
  ModelConfig effective_model = model_config;
  if (modulation.scheme == ModulationScheme::kGBlending) {
    effective_model.unimodal_heads = true;
  }
  Session session(dataset, effective_model, config);
  const double remainder = 1.0 - modulation.blending_w_uv;
  LossWeights weights;
  if (modulation.scheme == ModulationScheme::kGBlending) {
    weights.joint = modulation.blending_w_uv;
    weights.heads = {remainder / 2.0, remainder / 2.0};
  }

  TrainRunReport report;
  int greedy_window = 0;
  int lagging = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const bool modulate = epoch >= config.warmup_epochs;
    const std::vector<int> order = session.ShuffledOrder();
    double loss_sum = 0.0;
    int steps = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(
          order.size(), begin + static_cast<std::size_t>(config.batch_size));
      const std::vector<int> rows(order.begin() + begin, order.begin() + end);
      std::vector<double> scales;
      if (modulate && modulation.scheme == ModulationScheme::kOgmGe) {
        std::vector<double> phi_u;
        std::vector<double> phi_v;
        for (const auto& record :
             PredictionRecords(session.model(), dataset.train, rows)) {
          const ContributionVector phi = ExactShapley(record);
          phi_u.push_back(phi.phi[0]);
          phi_v.push_back(phi.phi[1]);
        }
        const std::vector<double> k = {
            OgmGeCoefficient(MeanGap(phi_u), modulation.ogm_alpha,
                             modulation.ogm_beta),
            OgmGeCoefficient(MeanGap(phi_v), modulation.ogm_alpha,
                             modulation.ogm_beta)};
        scales = EncoderScales(session.model(), k);
        report.modulation.push_back({epoch + 1, steps, k});
      }
      loss_sum += session.Step(dataset.train.Rows(rows),
                               LabelsOf(dataset.train, rows), weights, scales,
                               1.0, epoch);
      ++steps;
    }

    std::vector<long long> counts(2, 0);
    if (greedy_window > 0) {
      std::uniform_int_distribution<int> pick_row(0, dataset.train.size() - 1);
      std::vector<ResampleItem> items;
      for (int q = 0; q < greedy_window * config.batch_size; ++q) {
        items.push_back({pick_row(session.resample_rng()), lagging});
      }
      counts = session.TrainExtra(std::move(items), weights, epoch);
      greedy_window = 0;
    }

    const Valuation valuation = ValuateSplit(session.model(), dataset.train);
    report.epochs.push_back(
        session.Record(epoch, loss_sum / steps, std::move(counts), valuation));
    if (!session.Schedules(epoch)) continue;

    const double gap_u = ContributionGap(valuation.avg_phi[0]);
    const double gap_v = ContributionGap(valuation.avg_phi[1]);
    if (modulation.scheme == ModulationScheme::kGBlending) {
      BlendingWeights blend;
      try {
        blend = GBlendingWeights(modulation.blending_w_uv, gap_u, gap_v,
                                 modulation.blending_alpha);
      } catch (const Error& error) {
        if (error.code() != ErrorCode::kDegenerateGaps) throw;
        // No gap left to steer by (perfect training accuracy).
        blend = GBlendingWeights(modulation.blending_w_uv, 0.0, 0.0,
                                 modulation.blending_alpha);
      }
      weights.joint = blend.w_uv;
      weights.heads = {blend.w_u, blend.w_v};
      report.modulation.push_back(
          {epoch + 1, steps, {blend.w_uv, blend.w_u, blend.w_v}});
    } else if (modulation.scheme == ModulationScheme::kGreedy) {
      greedy_window = GreedyWindow(gap_u, gap_v, modulation.greedy_lambda,
                                   modulation.greedy_alpha);
      lagging = gap_u >= gap_v ? 0 : 1;
      report.modulation.push_back(
          {epoch + 1, steps, {static_cast<double>(greedy_window)}});
    }
  }
  return report;
}

void WriteTrajectoryCsv(const TrainRunReport& report, std::ostream& out) {
  const int n = report.epochs.empty()
                    ? 0
                    : static_cast<int>(report.epochs.front().avg_phi.size());
  out << "epoch,train_loss,train_accuracy,test_accuracy";
  for (int i = 0; i < n; ++i) out << ",phi_" << i;
  for (int i = 0; i < n; ++i) out << ",resample_" << i;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& epoch : report.epochs) {
    out << epoch.epoch << ',' << epoch.train_loss << ','
        << epoch.train_accuracy << ',' << epoch.test_accuracy;
    for (double phi : epoch.avg_phi) out << ',' << phi;
    for (long long c : epoch.resample_counts) out << ',' << c;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace mmval::sim
