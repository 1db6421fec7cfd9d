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

#include "mmval/io/cli.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "mmval/error.h"
#include "mmval/io/prediction_log.h"
#include "mmval/io/sim_config.h"
#include "mmval/io/tables.h"
#include "mmval/modulation.h"
#include "mmval/schedulers.h"
#include "mmval/theory.h"
#include "mmval/valuation.h"

namespace mmval::io {
namespace {

std::string Fixed(double value, int digits = 6) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
  return buffer;
}

// Opens `path` for writing, or returns `fallback` when path is empty.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_.open(path);
    if (!file_) throw Error(ErrorCode::kIoError, "cannot write " + path);
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }
  void Close(const std::string& path) {
    if (path.empty()) return;
    file_.close();
    if (!file_) throw Error(ErrorCode::kIoError, "cannot write " + path);
  }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

struct ValuateArgs {
  std::string log;
  std::string out;
  std::optional<int> mc;
  std::optional<std::uint64_t> seed;
  bool lenient = false;
  bool partial = false;
};

int Valuate(const ValuateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.mc.has_value() && !a.seed.has_value()) {
    throw Error(ErrorCode::kInvalidArgument, "--mc requires --seed");
  }
  if (a.partial && !a.mc.has_value()) {
    throw Error(ErrorCode::kInvalidArgument,
                "--partial records need Monte Carlo valuation (--mc)");
  }
  IngestOptions options;
  options.strict = !a.lenient;
  options.allow_partial = a.partial;
  IngestResult log = IngestFile(a.log, options);
  for (const auto& issue : log.skipped) err << "skipped " << issue.message << '\n';
  if (log.records.empty()) err << "warning: " << a.log << " holds no records\n";

  std::vector<ContributionVector> vectors;
  vectors.reserve(log.records.size());
  for (const auto& record : log.records) {
    vectors.push_back(a.mc ? MonteCarloShapley(OracleFor(record), record.n,
                                               *a.mc, *a.seed)
                           : ExactShapley(record));
    vectors.back().sample_id = record.sample_id;
  }
  // Output order depends only on the set of records, not on log order.
  std::stable_sort(vectors.begin(), vectors.end(),
                   [](const auto& x, const auto& y) {
                     return x.sample_id < y.sample_id;
                   });
  Output sink(a.out, out);
  WriteContributionsCsv(vectors, sink.get());
  sink.Close(a.out);
  if (!a.out.empty()) {
    out << "valuated " << vectors.size() << " records";
    if (!log.skipped.empty()) out << ", skipped " << log.skipped.size();
    out << '\n';
  }
  return kExitOk;
}

struct ScheduleArgs {
  std::string contributions;
  std::string level;
  std::string f_s = DefaultSampleMap().ToString();
  std::string f_m = "identity";
  double z = 0.2;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int Schedule(const ScheduleArgs& a, std::ostream& out) {
  std::vector<ContributionVector> vectors =
      ReadContributionsCsvFile(a.contributions);
  Output sink(a.out, out);
  if (a.level == "sample") {
    WriteSamplePlanCsv(SampleLevelPlan(vectors, MonotoneMap::Parse(a.f_s)),
                       sink.get());
  } else {
    if (vectors.empty()) {
      throw Error(ErrorCode::kEmptyDataset, "no contribution vectors");
    }
    const MonotoneMap f_m = MonotoneMap::Parse(a.f_m);
    const int z = SubsetSizeFromFraction(a.z, vectors.size());
    std::vector<ContributionVector> subset;
    if (static_cast<std::size_t>(z) == vectors.size()) {
      subset = vectors;
    } else {
      if (!a.seed.has_value()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "--Z below 1 draws a random subset and requires --seed");
      }
      for (const std::size_t i : DrawSubset(vectors.size(), z, *a.seed)) {
        subset.push_back(vectors[i]);
      }
    }
    WriteModalityPlanCsv(ModalityLevelPlan(AverageContributions(subset), f_m, z),
                         sink.get());
  }
  sink.Close(a.out);
  return kExitOk;
}

struct TrainArgs {
  std::string spec;
  std::optional<std::string> strategy;
  std::uint64_t seed = 0;
  std::string out;
};

int TrainSim(const TrainArgs& a, std::ostream& out) {
  SimConfig config = LoadSimConfig(a.spec);
  config.train.seed = a.seed;
  if (!config.dataset_seed_set) config.dataset.seed = a.seed;
  std::optional<sim::ModulationScheme> scheme;
  if (a.strategy.has_value()) {
    const std::string& name = *a.strategy;
    if (name == "ogm-ge" || name == "g-blending" || name == "greedy") {
      scheme = sim::ParseScheme(name);
    } else {
      config.train.strategy = sim::ParseStrategy(name);
    }
  }
  const sim::Dataset dataset = sim::GenerateDataset(config.dataset);
  sim::TrainRunReport report;
  if (scheme.has_value()) {
    config.modulation.scheme = *scheme;
    report = sim::RunModulated(dataset, config.model, config.train,
                               config.modulation);
  } else {
    report = sim::Train(dataset, config.model, config.train);
  }
  Output sink(a.out, out);
  sim::WriteTrajectoryCsv(report, sink.get());
  sink.Close(a.out);
  if (!a.out.empty()) {
    const auto& last = report.final();
    out << "final test accuracy " << Fixed(last.test_accuracy, 4)
        << ", train accuracy " << Fixed(last.train_accuracy, 4)
        << ", re-sampled items " << report.TotalResamples() << '\n';
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string corollary;
  int n = 3;
  long long trials = 100000;
  std::optional<std::uint64_t> seed;
  bool no_enhance = false;
};

int Verify(const VerifyArgs& a, std::ostream& out) {
  if (a.corollary == "sweep") {
    const theory::SweepReport report = theory::ExhaustiveTableSweep(a.n);
    out << "efficiency: " << report.efficiency_failures
        << " failures (max error " << report.max_efficiency_error << ")\n"
        << "permutation equivalence: " << report.equivalence_failures
        << " failures (max error " << report.max_equivalence_error << ")\n"
        << "admissible " << report.admissible << ", inadmissible "
        << report.inadmissible << ", full-benefit admissible "
        << report.admissible_full_benefit << '\n'
        << report.Summary() << '\n';
    return report.ok() ? kExitOk : kExitValidation;
  }
  if (a.corollary == "1") {
    if (a.n < 1 || a.n > 4) {
      throw Error(ErrorCode::kInvalidArgument,
                  "corollary 1 enumeration needs 1 <= n <= 4");
    }
    const std::uint64_t tables = std::uint64_t{1} << (SubsetCount(a.n) - 1);
    std::uint64_t checked = 0;
    std::uint64_t violations = 0;
    double min_slack = 0.0;
    for (std::uint64_t index = 0; index < tables; ++index) {
      const auto table = theory::BenefitTable::FromIndex(a.n, index);
      if (!table.admissible() || !table.full_benefit()) continue;
      const auto report = theory::Corollary1BoundCheck(table);
      const double slack =
          *std::min_element(report.slack.begin(), report.slack.end());
      min_slack = checked == 0 ? slack : std::min(min_slack, slack);
      ++checked;
      if (!report.holds()) ++violations;
    }
    out << "corollary 1, n=" << a.n << ": " << checked
        << " admissible full-benefit tables, " << violations
        << " violations, min slack " << Fixed(min_slack) << '\n';
    return violations == 0 ? kExitOk : kExitValidation;
  }
  if (a.corollary == "2") {
    if (!a.seed.has_value()) {
      throw Error(ErrorCode::kInvalidArgument, "corollary 2 requires --seed");
    }
    const auto r = theory::Corollary2ExpectationSim(a.n, a.trials, *a.seed,
                                                    !a.no_enhance);
    out << "corollary 2, n=" << r.n << ", trials=" << r.trials
        << (r.enhanced ? ", enhanced" : ", control") << ": estimate "
        << Fixed(r.estimate) << " +/- " << Fixed(r.std_error)
        << " (analytic " << Fixed(r.analytic) << ")\n";
    const bool ok = r.enhanced ? r.PositiveAt3Sigma()
                               : r.WithinThreeSigmaOfZero();
    out << (r.enhanced ? "positive at 3 sigma: " : "within 3 sigma of zero: ")
        << (ok ? "yes" : "no") << '\n';
    return ok ? kExitOk : kExitValidation;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "--corollary must be 1, 2 or sweep");
}

struct ModulateArgs {
  std::string scheme;
  std::optional<double> g;
  std::optional<double> gu;
  std::optional<double> gv;
  std::optional<double> w_uv;
  std::optional<double> alpha;
  double beta = kDefaultOgmBeta;
  std::optional<double> lambda;
};

double Need(const std::optional<double>& value, const char* flag,
            const std::string& scheme) {
  if (!value.has_value()) {
    throw Error(ErrorCode::kInvalidArgument,
                scheme + " requires " + std::string(flag));
  }
  return *value;
}

int Modulate(const ModulateArgs& a, std::ostream& out) {
  if (a.scheme == "ogm-ge") {
    const double alpha = a.alpha.value_or(1.0);
    if (a.g.has_value()) {
      out << "k=" << Fixed(OgmGeCoefficient(*a.g, alpha, a.beta)) << '\n';
    } else {
      const double gu = Need(a.gu, "--gu", a.scheme);
      const double gv = Need(a.gv, "--gv", a.scheme);
      const double k_u = OgmGeCoefficient(gu, alpha, a.beta);
      const double k_v = OgmGeCoefficient(gv, alpha, a.beta);
      out << "k_u=" << Fixed(k_u) << " k_v=" << Fixed(k_v) << '\n';
    }
  } else if (a.scheme == "g-blending") {
    const double w_uv = Need(a.w_uv, "--wuv", a.scheme);
    const double gu = Need(a.gu, "--gu", a.scheme);
    const double gv = Need(a.gv, "--gv", a.scheme);
    const BlendingWeights w =
        GBlendingWeights(w_uv, gu, gv, a.alpha.value_or(1.0));
    out << "w_uv=" << Fixed(w.w_uv) << " w_u=" << Fixed(w.w_u)
        << " w_v=" << Fixed(w.w_v) << '\n';
  } else if (a.scheme == "greedy") {
    const double gu = Need(a.gu, "--gu", a.scheme);
    const double gv = Need(a.gv, "--gv", a.scheme);
    const double lambda = Need(a.lambda, "--lambda", a.scheme);
    out << "Q=" << GreedyWindow(gu, gv, lambda, a.alpha.value_or(1.0)) << '\n';
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "--scheme must be ogm-ge, g-blending or greedy");
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Modality valuation, re-sample scheduling and simulation",
               "mmval"};
  app.require_subcommand(1);

  ValuateArgs valuate;
  auto* valuate_cmd =
      app.add_subcommand("valuate", "Per-sample Shapley contributions");
  valuate_cmd->add_option("log", valuate.log, "Prediction log (JSONL)")
      ->required();
  valuate_cmd->add_option("--out", valuate.out, "Contributions CSV path");
  valuate_cmd->add_option("--mc", valuate.mc, "Monte Carlo permutations")
      ->check(CLI::PositiveNumber);
  valuate_cmd->add_option("--seed", valuate.seed, "Monte Carlo seed");
  valuate_cmd->add_flag("--lenient", valuate.lenient,
                        "Skip malformed lines instead of aborting");
  valuate_cmd->add_flag("--partial", valuate.partial,
                        "Accept records missing some subsets");

  ScheduleArgs schedule;
  auto* schedule_cmd =
      app.add_subcommand("schedule", "Re-sample plan from contributions");
  schedule_cmd
      ->add_option("contributions", schedule.contributions,
                   "Contributions CSV")
      ->required();
  schedule_cmd->add_option("--level", schedule.level, "sample or modality")
      ->required()
      ->check(CLI::IsMember({"sample", "modality"}));
  schedule_cmd->add_option("--fs", schedule.f_s, "Frequency map")
      ->capture_default_str();
  schedule_cmd->add_option("--fm", schedule.f_m, "Probability map")
      ->capture_default_str();
  schedule_cmd->add_option("--Z", schedule.z, "Subset fraction")
      ->capture_default_str();
  schedule_cmd->add_option("--seed", schedule.seed, "Subset seed");
  schedule_cmd->add_option("--out", schedule.out, "Plan CSV path");

  TrainArgs train;
  auto* train_cmd =
      app.add_subcommand("train-sim", "Train on a synthetic dataset");
  train_cmd->add_option("--spec", train.spec, "Simulator TOML")->required();
  train_cmd->add_option("--strategy", train.strategy,
                        "Re-sample strategy or modulation scheme");
  train_cmd->add_option("--seed", train.seed, "Run seed")->required();
  train_cmd->add_option("--out", train.out, "Trajectory CSV path");

  VerifyArgs verify;
  auto* verify_cmd =
      app.add_subcommand("verify", "Numerical checks of valuation theory");
  verify_cmd->add_option("--corollary", verify.corollary, "1, 2 or sweep")
      ->required();
  verify_cmd->add_option("--n", verify.n, "Modality count")
      ->capture_default_str();
  verify_cmd->add_option("--trials", verify.trials, "Monte Carlo trials")
      ->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "Monte Carlo seed");
  verify_cmd->add_flag("--no-enhance", verify.no_enhance,
                       "Control run without the enhancement");

  ModulateArgs modulate;
  auto* modulate_cmd =
      app.add_subcommand("modulate", "Modulation coefficients from gaps");
  modulate_cmd->add_option("--scheme", modulate.scheme,
                           "ogm-ge, g-blending or greedy")
      ->required();
  modulate_cmd->add_option("--g", modulate.g, "Mean gap (OGM-GE)");
  modulate_cmd->add_option("--gu", modulate.gu, "Mean gap of modality u");
  modulate_cmd->add_option("--gv", modulate.gv, "Mean gap of modality v");
  modulate_cmd->add_option("--wuv", modulate.w_uv, "Joint-loss weight");
  modulate_cmd->add_option("--alpha", modulate.alpha, "Sensitivity alpha");
  modulate_cmd->add_option("--beta", modulate.beta, "OGM-GE beta")
      ->capture_default_str();
  modulate_cmd->add_option("--lambda", modulate.lambda, "Greedy lambda");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*valuate_cmd) return Valuate(valuate, out, err);
    if (*schedule_cmd) return Schedule(schedule, out);
    if (*train_cmd) return TrainSim(train, out);
    if (*verify_cmd) return Verify(verify, out);
    return Modulate(modulate, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kIoError ? kExitIo : kExitValidation;
  }
}

}  // namespace mmval::io
