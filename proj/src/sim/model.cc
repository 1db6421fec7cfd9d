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

#include "mmval/sim/model.h"

#include <cmath>
#include <random>
#include <string>

#include "mmval/error.h"

namespace mmval::sim {
namespace {

Eigen::MatrixXd UniformInit(int rows, int cols, int fan_in,
                            std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = uniform(rng);
  }
  return m;
}

// Row-wise softmax and mean negative log-likelihood of `labels`.
double SoftmaxCrossEntropy(const Eigen::MatrixXd& logits,
                           std::span<const int> labels,
                           Eigen::MatrixXd* probabilities) {
  const Eigen::Index rows = logits.rows();
  Eigen::MatrixXd p(rows, logits.cols());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double max = logits.row(r).maxCoeff();
    p.row(r) = (logits.row(r).array() - max).exp().matrix();
    const double z = p.row(r).sum();
    p.row(r) /= z;
    loss -= logits(r, labels[r]) - max - std::log(z);
  }
  if (probabilities != nullptr) *probabilities = std::move(p);
  return loss / static_cast<double>(rows);
}

Eigen::MatrixXd OneHot(std::span<const int> labels, int classes) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(labels.size()), classes);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    y(static_cast<Eigen::Index>(r), labels[r]) = 1.0;
  }
  return y;
}

}  // namespace

MultiModalModel::MultiModalModel(const ModelConfig& config,
                                 std::vector<int> input_dims, int classes,
                                 std::uint64_t seed)
    : config_(config), input_dims_(std::move(input_dims)), classes_(classes) {
  if (input_dims_.empty() || classes_ < 2 || config_.embedding_dim < 1 ||
      (config_.encoder == EncoderKind::kMlp && config_.hidden_dim < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid model configuration");
  }
  std::mt19937_64 rng(seed);
  const int e = config_.embedding_dim;
  const auto add = [&](Eigen::MatrixXd tensor, ParameterOwner owner,
                       int modality) {
    parameters_.push_back(std::move(tensor));
    info_.push_back({owner, modality});
  };
  for (int i = 0; i < modalities(); ++i) {
    const int d = input_dims_[i];
    encoders_.push_back({static_cast<int>(parameters_.size())});
    if (config_.encoder == EncoderKind::kLinear) {
      add(UniformInit(d, e, d, rng), ParameterOwner::kEncoder, i);
      add(UniformInit(1, e, d, rng), ParameterOwner::kEncoder, i);
    } else {
      const int h = config_.hidden_dim;
      add(UniformInit(d, h, d, rng), ParameterOwner::kEncoder, i);
      add(UniformInit(1, h, d, rng), ParameterOwner::kEncoder, i);
      add(UniformInit(h, e, h, rng), ParameterOwner::kEncoder, i);
      add(UniformInit(1, e, h, rng), ParameterOwner::kEncoder, i);
    }
  }
  const int fused = e * modalities();
  classifier_ = static_cast<int>(parameters_.size());
  add(UniformInit(fused, classes_, fused, rng), ParameterOwner::kClassifier,
      -1);
  add(UniformInit(1, classes_, fused, rng), ParameterOwner::kClassifier, -1);
  if (config_.unimodal_heads) {
    for (int i = 0; i < modalities(); ++i) {
      heads_.push_back(static_cast<int>(parameters_.size()));
      add(UniformInit(e, classes_, e, rng), ParameterOwner::kHead, i);
      add(UniformInit(1, classes_, e, rng), ParameterOwner::kHead, i);
    }
  }
}

Eigen::MatrixXd MultiModalModel::Activate(const Eigen::MatrixXd& x) const {
  if (config_.activation == Activation::kRelu) return x.cwiseMax(0.0);
  return x.array().tanh().matrix();
}

Eigen::MatrixXd MultiModalModel::ActivationDerivative(
    const Eigen::MatrixXd& pre) const {
  if (config_.activation == Activation::kRelu) {
    return (pre.array() > 0.0).cast<double>().matrix();
  }
  return (1.0 - pre.array().tanh().square()).matrix();
}

Tensors MultiModalModel::ZerosLike() const {
  Tensors zeros;
  zeros.reserve(parameters_.size());
  for (const auto& p : parameters_) {
    zeros.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
  }
  return zeros;
}

Eigen::MatrixXd MultiModalModel::Logits(const MultiModalBatch& batch) const {
  if (batch.modalities() != modalities()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "batch has " + std::to_string(batch.modalities()) +
                    " modalities, model expects " +
                    std::to_string(modalities()));
  }
  const int e = config_.embedding_dim;
  const Eigen::MatrixXd& classifier_w = parameters_[classifier_];
  Eigen::MatrixXd logits =
      parameters_[classifier_ + 1].replicate(batch.rows(), 1);
  for (int i = 0; i < modalities(); ++i) {
    const int slot = encoders_[i].first;
    Eigen::MatrixXd embedding =
        (batch.features[i] * parameters_[slot]).rowwise() +
        parameters_[slot + 1].row(0);
    if (config_.encoder == EncoderKind::kMlp) {
      embedding = (Activate(embedding) * parameters_[slot + 2]).rowwise() +
                  parameters_[slot + 3].row(0);
    }
    logits.noalias() += embedding * classifier_w.middleRows(i * e, e);
  }
  return logits;
}

std::vector<int> MultiModalModel::Predict(const MultiModalBatch& batch) const {
  return RowArgmax(Logits(batch));
}

double MultiModalModel::Loss(const MultiModalBatch& batch,
                             std::span<const int> labels,
                             const LossWeights& weights,
                             Tensors* gradient) const {
  if (batch.modalities() != modalities() ||
      static_cast<Eigen::Index>(labels.size()) != batch.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "batch and labels do not match the model");
  }
  if (!weights.heads.empty() &&
      (!config_.unimodal_heads ||
       static_cast<int>(weights.heads.size()) != modalities())) {
    throw Error(ErrorCode::kInvalidArgument,
                "head loss weights need one uni-modal head per modality");
  }
  const int n = modalities();
  const int e = config_.embedding_dim;
  const Eigen::Index rows = batch.rows();
  const bool mlp = config_.encoder == EncoderKind::kMlp;

  // Forward, keeping what the backward pass needs.
  std::vector<Eigen::MatrixXd> pre(n);
  std::vector<Eigen::MatrixXd> hidden(n);
  Eigen::MatrixXd fused(rows, n * e);
  for (int i = 0; i < n; ++i) {
    const int slot = encoders_[i].first;
    pre[i] = (batch.features[i] * parameters_[slot]).rowwise() +
             parameters_[slot + 1].row(0);
    if (mlp) {
      hidden[i] = Activate(pre[i]);
      fused.middleCols(i * e, e) =
          (hidden[i] * parameters_[slot + 2]).rowwise() +
          parameters_[slot + 3].row(0);
    } else {
      fused.middleCols(i * e, e) = pre[i];
    }
  }
  const Eigen::MatrixXd logits =
      (fused * parameters_[classifier_]).rowwise() +
      parameters_[classifier_ + 1].row(0);
  Eigen::MatrixXd probabilities;
  double loss = weights.joint *
                SoftmaxCrossEntropy(logits, labels,
                                    gradient ? &probabilities : nullptr);

  const Eigen::MatrixXd targets =
      gradient ? OneHot(labels, classes_) : Eigen::MatrixXd();
  Eigen::MatrixXd d_fused;
  if (gradient != nullptr) {
    *gradient = ZerosLike();
    const Eigen::MatrixXd d_logits =
        (probabilities - targets) * (weights.joint / static_cast<double>(rows));
    (*gradient)[classifier_] = fused.transpose() * d_logits;
    (*gradient)[classifier_ + 1] = d_logits.colwise().sum();
    d_fused = d_logits * parameters_[classifier_].transpose();
  }

  for (int i = 0; i < static_cast<int>(weights.heads.size()); ++i) {
    const double w = weights.heads[i];
    if (w == 0.0) continue;
    const int slot = heads_[i];
    const Eigen::MatrixXd embedding = fused.middleCols(i * e, e);
    const Eigen::MatrixXd head_logits =
        (embedding * parameters_[slot]).rowwise() + parameters_[slot + 1].row(0);
    Eigen::MatrixXd head_probabilities;
    loss += w * SoftmaxCrossEntropy(head_logits, labels,
                                    gradient ? &head_probabilities : nullptr);
    if (gradient != nullptr) {
      const Eigen::MatrixXd d_head =
          (head_probabilities - targets) * (w / static_cast<double>(rows));
      (*gradient)[slot] = embedding.transpose() * d_head;
      (*gradient)[slot + 1] = d_head.colwise().sum();
      d_fused.middleCols(i * e, e) += d_head * parameters_[slot].transpose();
    }
  }

  if (gradient != nullptr) {
    for (int i = 0; i < n; ++i) {
      const int slot = encoders_[i].first;
      Eigen::MatrixXd d_pre = d_fused.middleCols(i * e, e);
      if (mlp) {
        (*gradient)[slot + 2] = hidden[i].transpose() * d_pre;
        (*gradient)[slot + 3] = d_pre.colwise().sum();
        d_pre = (d_pre * parameters_[slot + 2].transpose())
                    .cwiseProduct(ActivationDerivative(pre[i]));
      }
      (*gradient)[slot] = batch.features[i].transpose() * d_pre;
      (*gradient)[slot + 1] = d_pre.colwise().sum();
    }
  }
  return loss;
}

MomentumSgd::MomentumSgd(double learning_rate, double momentum)
    : learning_rate_(learning_rate), momentum_(momentum) {
  if (!(learning_rate > 0.0) || !(momentum >= 0.0 && momentum < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "need learning rate > 0 and momentum in [0, 1)");
  }
}

void MomentumSgd::Step(Tensors& parameters, const Tensors& gradient,
                       std::span<const double> scales, double lr_scale) {
  if (velocity_.empty()) {
    for (const auto& p : parameters) {
      velocity_.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
    }
  }
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    const double scale = scales.empty() ? 1.0 : scales[k];
    velocity_[k] = momentum_ * velocity_[k] + scale * gradient[k];
    parameters[k] -= (learning_rate_ * lr_scale) * velocity_[k];
  }
}

std::vector<int> RowArgmax(const Eigen::MatrixXd& scores) {
  std::vector<int> best(static_cast<std::size_t>(scores.rows()), 0);
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    int arg = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(r, c) > scores(r, arg)) arg = static_cast<int>(c);
    }
    best[static_cast<std::size_t>(r)] = arg;
  }
  return best;
}

}  // namespace mmval::sim
