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

#ifndef MMVAL_SIM_MODEL_H_
#define MMVAL_SIM_MODEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mmval/batch.h"

namespace mmval::sim {

enum class EncoderKind { kLinear, kMlp };
enum class Activation { kRelu, kTanh };

// One encoder per modality, concatenation fusion, linear classifier, softmax
// cross-entropy. Optional per-modality heads on the encoder outputs carry the
// uni-modal losses used by loss-blending schemes.
struct ModelConfig {
  EncoderKind encoder = EncoderKind::kLinear;
  int hidden_dim = 32;
  Activation activation = Activation::kRelu;
  int embedding_dim = 16;
  bool unimodal_heads = false;
};

// Weights on the joint loss and on each uni-modal head loss.
struct LossWeights {
  double joint = 1.0;
  // Empty means no head losses.
  std::vector<double> heads;
};

enum class ParameterOwner { kEncoder, kClassifier, kHead };

struct ParameterInfo {
  ParameterOwner owner;
  // Modality for encoder and head parameters; -1 for the classifier.
  int modality;
};

// Tensors matching the model's parameter list one-to-one.
using Tensors = std::vector<Eigen::MatrixXd>;

class MultiModalModel {
 public:
  // Parameters are drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  MultiModalModel(const ModelConfig& config, std::vector<int> input_dims,
                  int classes, std::uint64_t seed);

  int modalities() const { return static_cast<int>(input_dims_.size()); }
  int classes() const { return classes_; }
  const ModelConfig& config() const { return config_; }

  Eigen::MatrixXd Logits(const MultiModalBatch& batch) const;
  // Argmax of the logits; the lowest class index wins ties.
  std::vector<int> Predict(const MultiModalBatch& batch) const;

  // Weighted mean cross-entropy over the batch. Writes d(loss)/d(parameter)
  // into `gradient` when it is non-null.
  double Loss(const MultiModalBatch& batch, std::span<const int> labels,
              const LossWeights& weights, Tensors* gradient = nullptr) const;

  Tensors& parameters() { return parameters_; }
  const Tensors& parameters() const { return parameters_; }
  const std::vector<ParameterInfo>& parameter_info() const { return info_; }
  Tensors ZerosLike() const;

 private:
  struct EncoderSlots {
    int first = 0;  // W1, b1[, W2, b2]
  };

  Eigen::MatrixXd Activate(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd ActivationDerivative(const Eigen::MatrixXd& pre) const;

  ModelConfig config_;
  std::vector<int> input_dims_;
  int classes_;
  Tensors parameters_;
  std::vector<ParameterInfo> info_;
  std::vector<EncoderSlots> encoders_;
  int classifier_ = 0;
  std::vector<int> heads_;
};

// PyTorch-style momentum SGD: v <- mu * v + g; p <- p - lr * v.
class MomentumSgd {
 public:
  MomentumSgd(double learning_rate, double momentum);

  // `scales`, when nonempty, multiplies each parameter's gradient first.
  void Step(Tensors& parameters, const Tensors& gradient,
            std::span<const double> scales = {}, double lr_scale = 1.0);

 private:
  double learning_rate_;
  double momentum_;
  Tensors velocity_;
};

// Index of the largest entry of each row; lowest index wins ties.
std::vector<int> RowArgmax(const Eigen::MatrixXd& scores);

}  // namespace mmval::sim

#endif  // MMVAL_SIM_MODEL_H_
