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


#ifndef VFL_ATTACKS_GRN_H_
#define VFL_ATTACKS_GRN_H_

#include <cstdint>
#include <span>
#include <vector>

#include "vfl/linalg/matrix.h"
#include "vfl/linalg/rng.h"
#include "vfl/models/mlp.h"
#include "vfl/models/model.h"
#include "vfl/partition/partition.h"

namespace vfl {

// Generative regression network: an MLP f_G mapping (x_adv, r) to x_target,
// trained so that the frozen vertical model reproduces the observed
// confidence vectors on (x_adv, f_G(x_adv, r)).
struct GrnConfig {
  std::vector<std::size_t> hidden = {600, 200, 100};
  bool layer_norm = true;
  int epochs = 60;
  std::size_t batch_size = 64;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  // Omega = variance_weight * sum_i max(0, Var_batch(x_hat_i) - variance_threshold).
  double variance_weight = 1.0;
  double variance_threshold = 0.25;
  // Sigmoid output so estimates land in (0, 1); identity when false.
  bool squash = true;
  InitScheme init = InitScheme::kGaussian;
  double init_scale = 0.1;
  // Ablation switches for the generator input.
  bool use_adv_input = true;
  bool use_noise = true;
  std::uint64_t seed = 0;
};

// Generator input width: d_adv (if used) + d_target (if noise is used).
std::size_t grn_input_width(const GrnConfig& cfg, const VerticalPartition& part);

MlpModel make_generator(const GrnConfig& cfg, const VerticalPartition& part, Rng& rng);

// Concatenates the enabled input blocks row by row. `noise` must have
// d_target columns when noise is used and is ignored otherwise.
Matrix generator_input(const GrnConfig& cfg, const Matrix& x_adv, const Matrix& noise);

struct GrnLoss {
  double loss = 0.0;        // prediction_loss + penalty
  double prediction_loss = 0.0;
  double penalty = 0.0;
  MlpGradients gradients;   // with respect to the generator parameters
};

// Batch objective and its gradient, back-propagated through the frozen
// vertical model into the generator.
GrnLoss grn_loss_and_gradient(const MlpModel& generator, const TrainedModel& vertical_model,
                              const VerticalPartition& part, const GrnConfig& cfg,
                              const Matrix& x_adv, const Matrix& noise,
                              const Matrix& observed);

struct GrnResult {
  MlpModel generator;
  std::vector<double> loss_trace;  // mean batch loss per epoch
};

// Throws ModelKindError for trees and forests (distill a surrogate first)
// and NumericError naming the epoch on a non-finite loss.
GrnResult grn_train(const TrainedModel& vertical_model, const VerticalPartition& part,
                    const Matrix& x_adv, const Matrix& observed, const GrnConfig& cfg);

// One forward pass with fresh noise r ~ N(0, 1).
Vector grn_infer(const MlpModel& generator, const GrnConfig& cfg, const VerticalPartition& part,
                 std::span<const double> x_adv, Rng& rng);
Matrix grn_infer_rows(const MlpModel& generator, const GrnConfig& cfg,
                      const VerticalPartition& part, const Matrix& x_adv, Rng& rng);

// Generator-free ablation: every sample's x_target starts at N(0, 1) and is
// moved by plain gradient descent on the prediction loss, unconstrained.
struct NaiveRegressionConfig {
  int iterations = 200;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
};

Matrix naive_regression_attack(const TrainedModel& vertical_model,
                               const VerticalPartition& part, const Matrix& x_adv,
                               const Matrix& observed, const NaiveRegressionConfig& cfg);

}  // namespace vfl

#endif  // VFL_ATTACKS_GRN_H_
