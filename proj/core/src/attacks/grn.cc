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


#include "vfl/attacks/grn.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "vfl/errors.h"

namespace vfl {
namespace {

Matrix GaussianMatrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix out(rows, cols);
  for (double& x : out.data()) x = rng.normal();
  return out;
}

// Target-feature columns of a gradient over the joint feature ordering.
Matrix TargetColumns(const Matrix& full, const VerticalPartition& part) {
  Matrix out(full.rows(), part.num_target());
  const auto& idx = part.target_indices();
  for (std::size_t r = 0; r < full.rows(); ++r) {
    for (std::size_t j = 0; j < idx.size(); ++j) out(r, j) = full(r, idx[j]);
  }
  return out;
}

void CheckInputs(const TrainedModel& model, const VerticalPartition& part, const Matrix& x_adv,
                 const Matrix& observed) {
  if (model_num_features(model) != part.total_features()) {
    throw ShapeError("grn: model/partition feature count mismatch");
  }
  if (x_adv.cols() != part.num_adv()) throw ShapeError("grn: x_adv width mismatch");
  if (observed.rows() != x_adv.rows()) throw ShapeError("grn: x_adv/observed row mismatch");
  if (observed.cols() != model_num_classes(model)) {
    throw ShapeError("grn: observed confidence width mismatch");
  }
  if (part.num_target() == 0) throw InputError("grn: partition has no target features");
}

// Prediction loss plus the variance hinge for one batch; writes
// d loss / d x_hat into grad_estimate.
GrnLoss BatchLoss(const Matrix& estimate, DifferentiableModel& model,
                  const VerticalPartition& part, const GrnConfig& cfg, const Matrix& x_adv,
                  const Matrix& observed, Matrix& grad_estimate) {
  GrnLoss out;
  const Matrix joint = part.assemble_rows(x_adv, estimate);
  const Matrix predicted = model.forward(joint);
  Matrix grad_pred;
  out.prediction_loss = mlp_loss(MlpLoss::kMse, predicted, observed, &grad_pred);
  grad_estimate = TargetColumns(model.input_gradient(grad_pred), part);

  const std::size_t b = estimate.rows();
  for (std::size_t j = 0; j < estimate.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < b; ++r) mean += estimate(r, j);
    mean /= static_cast<double>(b);
    double var = 0.0;
    for (std::size_t r = 0; r < b; ++r) var += (estimate(r, j) - mean) * (estimate(r, j) - mean);
    var /= static_cast<double>(b);
    if (var <= cfg.variance_threshold || cfg.variance_weight == 0.0) continue;
    out.penalty += cfg.variance_weight * (var - cfg.variance_threshold);
    const double scale = cfg.variance_weight * 2.0 / static_cast<double>(b);
    for (std::size_t r = 0; r < b; ++r) grad_estimate(r, j) += scale * (estimate(r, j) - mean);
  }
  out.loss = out.prediction_loss + out.penalty;
  return out;
}

}  // namespace

std::size_t grn_input_width(const GrnConfig& cfg, const VerticalPartition& part) {
  return (cfg.use_adv_input ? part.num_adv() : 0) + (cfg.use_noise ? part.num_target() : 0);
}

MlpModel make_generator(const GrnConfig& cfg, const VerticalPartition& part, Rng& rng) {
  const std::size_t width = grn_input_width(cfg, part);
  if (width == 0) throw InputError("grn: generator has no input (adv input and noise both off)");
  if (part.num_target() == 0) throw InputError("grn: partition has no target features");
  MlpArchitecture arch;
  arch.input = width;
  arch.hidden = cfg.hidden;
  arch.output = part.num_target();
  arch.head = cfg.squash ? Head::kSigmoid : Head::kIdentity;
  arch.layer_norm = cfg.layer_norm;
  arch.init = cfg.init;
  arch.init_scale = cfg.init_scale;
  return make_mlp(arch, rng);
}

Matrix generator_input(const GrnConfig& cfg, const Matrix& x_adv, const Matrix& noise) {
  const std::size_t adv_w = cfg.use_adv_input ? x_adv.cols() : 0;
  const std::size_t noise_w = cfg.use_noise ? noise.cols() : 0;
  if (cfg.use_noise && noise.rows() != x_adv.rows()) {
    throw ShapeError("grn: noise/x_adv row mismatch");
  }
  Matrix out(x_adv.rows(), adv_w + noise_w);
  for (std::size_t r = 0; r < x_adv.rows(); ++r) {
    for (std::size_t j = 0; j < adv_w; ++j) out(r, j) = x_adv(r, j);
    for (std::size_t j = 0; j < noise_w; ++j) out(r, adv_w + j) = noise(r, j);
  }
  return out;
}

GrnLoss grn_loss_and_gradient(const MlpModel& generator, const TrainedModel& vertical_model,
                              const VerticalPartition& part, const GrnConfig& cfg,
                              const Matrix& x_adv, const Matrix& noise,
                              const Matrix& observed) {
  CheckInputs(vertical_model, part, x_adv, observed);
  DifferentiableModel model(vertical_model);
  MlpCache cache;
  const Matrix estimate =
      mlp_forward(generator, generator_input(cfg, x_adv, noise), false, nullptr, &cache);
  Matrix grad_estimate;
  GrnLoss out = BatchLoss(estimate, model, part, cfg, x_adv, observed, grad_estimate);
  out.gradients = mlp_backward(generator, cache, grad_estimate);
  return out;
}

GrnResult grn_train(const TrainedModel& vertical_model, const VerticalPartition& part,
                    const Matrix& x_adv, const Matrix& observed, const GrnConfig& cfg) {
  DifferentiableModel model(vertical_model);
  CheckInputs(vertical_model, part, x_adv, observed);
  if (x_adv.rows() == 0) throw InputError("grn: no prediction samples");
  if (cfg.batch_size == 0) throw InputError("grn: batch_size must be positive");

  Rng root(cfg.seed);
  Rng init_rng = root.fork("init");
  Rng order_rng = root.fork("order");
  Rng noise_rng = root.fork("noise");

  GrnResult result{make_generator(cfg, part, init_rng), {}};
  MlpModel& generator = result.generator;
  Optimizer opt(cfg.optimizer, cfg.learning_rate, cfg.momentum);

  const std::size_t n = x_adv.rows();
  const std::size_t dt = part.num_target();
  MlpCache cache;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = order_rng.permutation(n);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      Matrix xb(stop - start, x_adv.cols());
      Matrix vb(stop - start, observed.cols());
      for (std::size_t i = start; i < stop; ++i) {
        xb.set_row(i - start, x_adv.row(order[i]));
        vb.set_row(i - start, observed.row(order[i]));
      }
      const Matrix noise =
          cfg.use_noise ? GaussianMatrix(stop - start, dt, noise_rng) : Matrix();
      const Matrix estimate =
          mlp_forward(generator, generator_input(cfg, xb, noise), false, nullptr, &cache);
      Matrix grad_estimate;
      const GrnLoss loss = BatchLoss(estimate, model, part, cfg, xb, vb, grad_estimate);
      if (!std::isfinite(loss.loss)) {
        throw NumericError("grn: non-finite loss at epoch " + std::to_string(epoch));
      }
      opt.step(generator, mlp_backward(generator, cache, grad_estimate));
      total += loss.loss;
      ++batches;
    }
    result.loss_trace.push_back(total / static_cast<double>(batches));
  }
  return result;
}

Matrix grn_infer_rows(const MlpModel& generator, const GrnConfig& cfg,
                      const VerticalPartition& part, const Matrix& x_adv, Rng& rng) {
  if (generator.output_size() != part.num_target()) {
    throw ShapeError("grn: generator output width " + std::to_string(generator.output_size()) +
                     " != d_target " + std::to_string(part.num_target()));
  }
  if (x_adv.cols() != part.num_adv()) throw ShapeError("grn: x_adv width mismatch");
  const Matrix noise =
      cfg.use_noise ? GaussianMatrix(x_adv.rows(), part.num_target(), rng) : Matrix();
  const Matrix input = generator_input(cfg, x_adv, noise);
  if (input.cols() != generator.input_size()) throw ShapeError("grn: generator input width");
  return mlp_forward(generator, input);
}

Vector grn_infer(const MlpModel& generator, const GrnConfig& cfg, const VerticalPartition& part,
                 std::span<const double> x_adv, Rng& rng) {
  Matrix row(1, x_adv.size());
  row.set_row(0, x_adv);
  return grn_infer_rows(generator, cfg, part, row, rng).row_vector(0);
}

Matrix naive_regression_attack(const TrainedModel& vertical_model,
                               const VerticalPartition& part, const Matrix& x_adv,
                               const Matrix& observed, const NaiveRegressionConfig& cfg) {
  DifferentiableModel model(vertical_model);
  CheckInputs(vertical_model, part, x_adv, observed);
  Rng rng(cfg.seed);
  Matrix estimate = GaussianMatrix(x_adv.rows(), part.num_target(), rng);
  // mlp_loss averages over the batch; rescale so each sample takes a step on
  // its own loss.
  const double step = cfg.learning_rate * static_cast<double>(x_adv.rows());
  for (int it = 0; it < cfg.iterations; ++it) {
    const Matrix predicted = model.forward(part.assemble_rows(x_adv, estimate));
    Matrix grad_pred;
    const double loss = mlp_loss(MlpLoss::kMse, predicted, observed, &grad_pred);
    if (!std::isfinite(loss)) {
      throw NumericError("naive regression: non-finite loss at iteration " + std::to_string(it));
    }
    const Matrix grad = TargetColumns(model.input_gradient(grad_pred), part);
    auto e = estimate.data();
    const auto g = grad.data();
    for (std::size_t i = 0; i < e.size(); ++i) e[i] -= step * g[i];
  }
  return estimate;
}

}  // namespace vfl
