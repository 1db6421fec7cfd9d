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

#include "mmval/io/sim_config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "mmval/error.h"
#include "toml.hpp"

namespace mmval::io {
namespace {

std::size_t LineOf(const toml::node& node) {
  return static_cast<std::size_t>(node.source().begin.line);
}

[[noreturn]] void Fail(const toml::node& node, const std::string& message) {
  const std::size_t line = LineOf(node);
  throw ParseError(ErrorCode::kParseError, line,
                   "line " + std::to_string(line) + ": " + message);
}

// Typed reader over one table that remembers which keys were consumed.
class Section {
 public:
  Section(const toml::table& root, std::string name) : name_(std::move(name)) {
    if (const toml::node* node = root.get(name_)) {
      table_ = node->as_table();
      if (table_ == nullptr) Fail(*node, "[" + name_ + "] must be a table");
    }
  }

  template <typename T>
  void Read(const char* key, T& out) {
    const toml::node* node = Find(key);
    if (node == nullptr) return;
    if constexpr (std::is_same_v<T, double>) {
      if (auto v = node->value<double>()) {
        out = *v;
        return;
      }
      Fail(*node, Qualified(key) + " must be a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (auto v = node->value_exact<bool>()) {
        out = *v;
        return;
      }
      Fail(*node, Qualified(key) + " must be a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (auto v = node->value_exact<std::string>()) {
        out = *v;
        return;
      }
      Fail(*node, Qualified(key) + " must be a string");
    } else {
      if (auto v = node->value_exact<int64_t>()) {
        if (*v < 0 && std::is_unsigned_v<T>) {
          Fail(*node, Qualified(key) + " must be nonnegative");
        }
        out = static_cast<T>(*v);
        return;
      }
      Fail(*node, Qualified(key) + " must be an integer");
    }
  }

  template <typename T>
  void ReadArray(const char* key, std::vector<T>& out) {
    const toml::node* node = Find(key);
    if (node == nullptr) return;
    const toml::array* array = node->as_array();
    if (array == nullptr) Fail(*node, Qualified(key) + " must be an array");
    out.clear();
    for (const toml::node& element : *array) {
      std::optional<T> v;
      if constexpr (std::is_same_v<T, double>) {
        v = element.value<double>();
      } else {
        if (auto i = element.value_exact<int64_t>()) v = static_cast<T>(*i);
      }
      if (!v) Fail(element, Qualified(key) + " has an element of wrong type");
      out.push_back(*v);
    }
  }

  // Any key not consumed by a Read call is an error.
  void RejectUnknown() const {
    if (table_ == nullptr) return;
    for (const auto& [key, node] : *table_) {
      if (!seen_.contains(std::string(key.str()))) {
        Fail(node, "unknown key " + Qualified(std::string(key.str()).c_str()));
      }
    }
  }

  const toml::node* Find(const char* key) {
    seen_.insert(key);
    return table_ == nullptr ? nullptr : table_->get(key);
  }

 private:
  std::string Qualified(const char* key) const { return name_ + "." + key; }

  std::string name_;
  const toml::table* table_ = nullptr;
  std::set<std::string> seen_;
};

template <typename F>
auto Convert(const toml::node* node, F&& convert) {
  try {
    return convert();
  } catch (const Error& e) {
    if (node == nullptr) throw;
    Fail(*node, e.what());
  }
}

}  // namespace

SimConfig ParseSimConfig(std::string_view text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    const auto line = static_cast<std::size_t>(e.source().begin.line);
    throw ParseError(ErrorCode::kParseError, line,
                     "line " + std::to_string(line) + ": " +
                         std::string(e.description()));
  }
  for (const auto& [key, node] : root) {
    const std::string name(key.str());
    if (name != "dataset" && name != "model" && name != "train" &&
        name != "modulation") {
      Fail(node, "unknown table [" + name + "]");
    }
  }

  SimConfig config;

  Section dataset(root, "dataset");
  auto& spec = config.dataset;
  dataset.Read("classes", spec.classes);
  dataset.Read("train_samples", spec.train_samples);
  dataset.Read("test_samples", spec.test_samples);
  dataset.ReadArray("feature_dims", spec.feature_dims);
  dataset.ReadArray("separation", spec.separation);
  dataset.Read("noise_stddev", spec.noise_stddev);
  std::string mode = "dataset-biased";
  dataset.Read("mode", mode);
  const toml::node* mode_node = dataset.Find("mode");
  if (mode == "dataset-biased") {
    spec.mode = sim::Heterogeneity::kDatasetBiased;
  } else if (mode == "sample-mixed") {
    spec.mode = sim::Heterogeneity::kSampleMixed;
  } else {
    Fail(*mode_node, "dataset.mode must be dataset-biased or sample-mixed");
  }
  config.dataset_seed_set = dataset.Find("seed") != nullptr;
  dataset.Read("seed", spec.seed);
  dataset.RejectUnknown();

  Section model(root, "model");
  std::string encoder = "linear";
  model.Read("encoder", encoder);
  if (encoder == "linear") {
    config.model.encoder = sim::EncoderKind::kLinear;
  } else if (encoder == "mlp") {
    config.model.encoder = sim::EncoderKind::kMlp;
  } else {
    Fail(*model.Find("encoder"), "model.encoder must be linear or mlp");
  }
  std::string activation = "relu";
  model.Read("activation", activation);
  if (activation == "relu") {
    config.model.activation = sim::Activation::kRelu;
  } else if (activation == "tanh") {
    config.model.activation = sim::Activation::kTanh;
  } else {
    Fail(*model.Find("activation"), "model.activation must be relu or tanh");
  }
  model.Read("hidden_dim", config.model.hidden_dim);
  model.Read("embedding_dim", config.model.embedding_dim);
  model.Read("unimodal_heads", config.model.unimodal_heads);
  model.RejectUnknown();

  Section train(root, "train");
  auto& tc = config.train;
  train.Read("epochs", tc.epochs);
  train.Read("warmup_epochs", tc.warmup_epochs);
  train.Read("batch_size", tc.batch_size);
  train.Read("learning_rate", tc.learning_rate);
  train.Read("momentum", tc.momentum);
  std::string strategy(sim::StrategyName(tc.strategy));
  train.Read("strategy", strategy);
  tc.strategy = Convert(train.Find("strategy"),
                        [&] { return sim::ParseStrategy(strategy); });
  std::string f_s = tc.f_s.ToString();
  train.Read("f_s", f_s);
  tc.f_s = Convert(train.Find("f_s"), [&] { return MonotoneMap::Parse(f_s); });
  std::string f_m = tc.f_m.ToString();
  train.Read("f_m", f_m);
  tc.f_m = Convert(train.Find("f_m"), [&] { return MonotoneMap::Parse(f_m); });
  train.Read("subset_fraction", tc.subset_fraction);
  train.Read("fixed_rate", tc.fixed_rate);
  train.Read("resample_lr_scale", tc.resample_lr_scale);
  train.Read("seed", tc.seed);
  train.RejectUnknown();

  Section modulation(root, "modulation");
  auto& mc = config.modulation;
  std::string scheme(sim::SchemeName(mc.scheme));
  modulation.Read("scheme", scheme);
  mc.scheme = Convert(modulation.Find("scheme"),
                      [&] { return sim::ParseScheme(scheme); });
  modulation.Read("ogm_alpha", mc.ogm_alpha);
  modulation.Read("ogm_beta", mc.ogm_beta);
  modulation.Read("blending_w_uv", mc.blending_w_uv);
  modulation.Read("blending_alpha", mc.blending_alpha);
  modulation.Read("greedy_lambda", mc.greedy_lambda);
  modulation.Read("greedy_alpha", mc.greedy_alpha);
  modulation.RejectUnknown();

  config.dataset.Validate();
  config.train.Validate();
  return config;
}

SimConfig LoadSimConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseSimConfig(text.str());
}

}  // namespace mmval::io
