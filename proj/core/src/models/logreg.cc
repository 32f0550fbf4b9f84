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

#include "vfl/models/logreg.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "vfl/errors.h"
#include "vfl/linalg/activations.h"
#include "vfl/linalg/rng.h"

namespace vfl {
namespace {

// Linear scores z = W x + b for every row of x, shape n x rows(W).
Matrix Scores(const LogRegModel& m, const Matrix& x) {
  Matrix z(x.rows(), m.weights.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto xr = x.row(r);
    for (std::size_t k = 0; k < m.weights.rows(); ++k) {
      z(r, k) = dot(m.weights.row(k), xr) + (m.bias.empty() ? 0.0 : m.bias[k]);
    }
  }
  return z;
}

Matrix ScoresToConfidence(const LogRegModel& m, Matrix z) {
  if (m.binary()) {
    Matrix v(z.rows(), 2);
    for (std::size_t r = 0; r < z.rows(); ++r) {
      const double s = sigmoid(z(r, 0));
      v(r, 0) = s;
      v(r, 1) = 1.0 - s;
    }
    return v;
  }
  softmax_rows(z);
  return z;
}

void RequireInput(const LogRegModel& m, std::size_t cols) {
  if (cols != m.num_features()) {
    throw ShapeError("logreg: input has " + std::to_string(cols) +
                     " features, model expects " + std::to_string(m.num_features()));
  }
}

}  // namespace

void LogRegModel::validate() const {
  if (num_classes < 2) throw InputError("logreg: num_classes must be >= 2");
  if (weights.cols() == 0) throw InputError("logreg: no features");
  const std::size_t expected_rows = num_classes == 2 && weights.rows() == 1
                                        ? 1
                                        : static_cast<std::size_t>(num_classes);
  if (weights.rows() != expected_rows) {
    throw InputError("logreg: weight rows do not match num_classes");
  }
  if (!bias.empty() && bias.size() != weights.rows()) {
    throw InputError("logreg: bias length does not match weight rows");
  }
}

Vector predict_logreg(const LogRegModel& model, std::span<const double> x) {
  RequireInput(model, x.size());
  Matrix xm(1, x.size());
  xm.set_row(0, x);
  return predict_logreg_rows(model, xm).row_vector(0);
}

Matrix predict_logreg_rows(const LogRegModel& model, const Matrix& x) {
  RequireInput(model, x.cols());
  return ScoresToConfidence(model, Scores(model, x));
}

LogRegGradient logreg_loss_and_grad(const LogRegModel& model, const Matrix& x,
                                    std::span<const int> labels) {
  RequireInput(model, x.cols());
  if (labels.size() != x.rows()) throw ShapeError("logreg: labels/rows mismatch");
  if (x.rows() == 0) throw InputError("logreg: empty batch");

  const Matrix v = ScoresToConfidence(model, Scores(model, x));
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  LogRegGradient g{0.0, Matrix(model.weights.rows(), model.weights.cols()),
                   model.bias.empty() ? Vector{} : Vector(model.bias.size(), 0.0)};

  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto y = static_cast<std::size_t>(labels[r]);
    g.loss -= std::log(std::max(v(r, y), 1e-300)) * inv_n;
    auto xr = x.row(r);
    for (std::size_t k = 0; k < model.weights.rows(); ++k) {
      // Binary row models class 0 through sigmoid; multiclass uses softmax.
      const double target = model.binary() ? (y == 0 ? 1.0 : 0.0) : (y == k ? 1.0 : 0.0);
      const double dz = (v(r, k) - target) * inv_n;
      auto gw = g.weights.row(k);
      for (std::size_t j = 0; j < xr.size(); ++j) gw[j] += dz * xr[j];
      if (!g.bias.empty()) g.bias[k] += dz;
    }
  }
  return g;
}

Matrix logreg_input_grad(const LogRegModel& model, const Matrix& x,
                         const Matrix& grad_scores) {
  RequireInput(model, x.cols());
  const Matrix v = ScoresToConfidence(model, Scores(model, x));
  if (grad_scores.rows() != v.rows() || grad_scores.cols() != v.cols()) {
    throw ShapeError("logreg_input_grad: gradient shape does not match output");
  }
  Matrix gx(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto dst = gx.row(r);
    if (model.binary()) {
      const double s = v(r, 0);
      const double dz = s * (1.0 - s) * (grad_scores(r, 0) - grad_scores(r, 1));
      auto w = model.weights.row(0);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = dz * w[j];
      continue;
    }
    double gv = 0.0;
    for (std::size_t k = 0; k < v.cols(); ++k) gv += grad_scores(r, k) * v(r, k);
    for (std::size_t k = 0; k < v.cols(); ++k) {
      const double dz = v(r, k) * (grad_scores(r, k) - gv);
      auto w = model.weights.row(k);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += dz * w[j];
    }
  }
  return gx;
}

LogRegModel train_logreg(const Dataset& data, const LogRegConfig& cfg) {
  if (data.size() == 0) throw InputError("train_logreg: empty dataset");
  data.validate();
  if (cfg.batch_size == 0) throw InputError("train_logreg: batch_size must be positive");
  if (cfg.epochs < 0) throw InputError("train_logreg: epochs must be non-negative");

  LogRegModel model;
  model.num_classes = std::max(2, data.num_classes);
  const std::size_t rows =
      model.num_classes == 2 && cfg.binary_single_row ? 1
                                                      : static_cast<std::size_t>(model.num_classes);
  model.weights = Matrix(rows, data.num_features());
  if (cfg.fit_bias) model.bias.assign(rows, 0.0);

  Matrix vel_w(rows, data.num_features());
  Vector vel_b(model.bias.size(), 0.0);
  Rng rng(cfg.seed);

  const std::size_t n = data.size();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = rng.permutation(n);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      std::span<const std::size_t> idx(order.data() + start, stop - start);
      const Dataset batch = data.subset(idx);
      LogRegGradient g = logreg_loss_and_grad(model, batch.features, batch.labels);
      if (!std::isfinite(g.loss)) {
        throw NumericError("train_logreg: non-finite loss at epoch " + std::to_string(epoch));
      }
      auto w = model.weights.data();
      auto gw = g.weights.data();
      auto vw = vel_w.data();
      for (std::size_t i = 0; i < w.size(); ++i) {
        vw[i] = cfg.momentum * vw[i] - cfg.learning_rate * (gw[i] + cfg.weight_decay * w[i]);
        w[i] += vw[i];
      }
      for (std::size_t k = 0; k < model.bias.size(); ++k) {
        vel_b[k] = cfg.momentum * vel_b[k] - cfg.learning_rate * g.bias[k];
        model.bias[k] += vel_b[k];
      }
    }
  }
  return model;
}

}  // namespace vfl
