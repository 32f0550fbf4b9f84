// Copyright 2026 The vflattack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VFL_MODELS_MLP_H_
#define VFL_MODELS_MLP_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vfl/data/dataset.h"
#include "vfl/linalg/matrix.h"
#include "vfl/linalg/rng.h"

namespace vfl {

enum class Head { kSoftmax, kSigmoid, kIdentity };

std::string_view head_name(Head head);
Head parse_head(std::string_view name);

// One affine map. Hidden layers are followed by optional layer norm, ReLU
// and inverted dropout; the last layer feeds the output head.
struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
  Vector ln_gain;  // empty when layer norm is off (and always for the last layer)
  Vector ln_bias;
  double dropout = 0.0;
};

// Multilayer perceptron: sizes = {input, hidden..., output}.
struct MlpModel {
  std::vector<std::size_t> sizes;
  Head head = Head::kSoftmax;
  bool layer_norm = false;
  std::vector<DenseLayer> layers;

  std::size_t input_size() const { return sizes.front(); }
  std::size_t output_size() const { return sizes.back(); }
  std::size_t num_parameters() const;
  void validate() const;
};

enum class InitScheme {
  // uniform(+-sqrt(6 / (fan_in + fan_out))) weights, zero biases
  kXavierUniform,
  // N(0, 1) * init_scale for weights and biases
  kGaussian,
};

struct MlpArchitecture {
  std::size_t input = 0;
  std::vector<std::size_t> hidden;
  std::size_t output = 0;
  Head head = Head::kSoftmax;
  bool layer_norm = false;
  double dropout = 0.0;  // applied after every hidden layer while training
  InitScheme init = InitScheme::kXavierUniform;
  double init_scale = 1.0;
};

MlpModel make_mlp(const MlpArchitecture& arch, Rng& rng);

// Per-layer activations kept for the backward pass.
struct MlpCache {
  struct Layer {
    Matrix input;     // B x in
    Matrix normed;    // B x out, (z - mean) / std when layer norm is on
    Vector inv_std;   // per row
    Matrix active;    // B x out, post-ReLU (hidden layers only)
    Matrix mask;      // B x out, dropout scale factors; empty if unused
  };
  std::vector<Layer> layers;
  Matrix output;  // B x out, post-head
};

// Batched forward pass. Dropout is only active when training is true, and
// then `rng` must be non-null. Inference is deterministic.
Matrix mlp_forward(const MlpModel& model, const Matrix& x, bool training = false,
                   Rng* rng = nullptr, MlpCache* cache = nullptr);
Vector mlp_predict(const MlpModel& model, std::span<const double> x);

struct MlpGradients {
  std::vector<DenseLayer> layers;  // same shapes as the model, dropout unused
  Matrix input;                    // B x input_size
};

// Gradients of a scalar loss given d loss / d output (post-head) for every
// row of the cached batch. Parameter gradients are skipped when
// `param_grads` is false; the input gradient is always produced.
MlpGradients mlp_backward(const MlpModel& model, const MlpCache& cache,
                          const Matrix& grad_output, bool param_grads = true);

// Visits (parameter, gradient) spans in a fixed order.
void for_each_param(MlpModel& model, const MlpGradients& grads,
                    const std::function<void(std::span<double>, std::span<const double>)>& fn);

enum class OptimizerKind { kSgd, kAdam };

// SGD with momentum or Adam over a fixed parameter layout.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, double momentum = 0.9,
            double weight_decay = 0.0);
  void step(MlpModel& model, const MlpGradients& grads);

 private:
  OptimizerKind kind_;
  double lr_;
  double momentum_;
  double weight_decay_;
  long step_count_ = 0;
  std::vector<Vector> first_;
  std::vector<Vector> second_;
};

enum class MlpLoss {
  // Softmax head only; targets may be soft distributions.
  kCrossEntropy,
  // Mean over outputs of the squared error, averaged over the batch.
  kMse,
};

struct MlpTrainConfig {
  std::vector<std::size_t> hidden = {600, 300, 100};
  Head head = Head::kSoftmax;
  bool layer_norm = false;
  double dropout = 0.0;
  MlpLoss loss = MlpLoss::kCrossEntropy;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
  int epochs = 20;
  std::size_t batch_size = 64;
  InitScheme init = InitScheme::kXavierUniform;
  double init_scale = 1.0;
  std::uint64_t seed = 0;
};

// Fits an MLP to (x, targets) pairs. Throws NumericError naming the epoch
// when the loss becomes non-finite.
MlpModel train_mlp(const Matrix& x, const Matrix& targets, const MlpTrainConfig& cfg);
// Classification convenience: one-hot targets, output width num_classes.
MlpModel train_mlp(const Dataset& data, const MlpTrainConfig& cfg);

// Loss value and d loss / d output for a batch.
double mlp_loss(MlpLoss loss, const Matrix& output, const Matrix& targets,
                Matrix* grad_output);

}  // namespace vfl

#endif  // VFL_MODELS_MLP_H_
