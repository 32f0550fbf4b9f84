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


#include "vfl/attacks/esa.h"

#include <algorithm>
#include <cmath>

#include "vfl/errors.h"

namespace vfl {
namespace {

void CheckShapes(const LogRegModel& model, const VerticalPartition& part,
                 std::span<const double> x_adv, std::span<const double> v) {
  if (model.num_features() != part.total_features()) {
    throw ShapeError("esa: model has " + std::to_string(model.num_features()) +
                     " features, partition has " + std::to_string(part.total_features()));
  }
  if (x_adv.size() != part.num_adv()) throw ShapeError("esa: x_adv length mismatch");
  if (v.size() != static_cast<std::size_t>(model.num_classes)) {
    throw ShapeError("esa: confidence vector length mismatch");
  }
}

// Row k of the differenced weights restricted to `cols`.
Matrix DiffRows(const LogRegModel& model, const std::vector<std::size_t>& cols) {
  const Matrix& w = model.weights;
  const std::size_t rows = model.binary() ? 1 : w.rows() - 1;
  Matrix out(rows, cols.size());
  for (std::size_t k = 0; k < rows; ++k) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(k, j) = model.binary() ? w(0, cols[j]) : w(k, cols[j]) - w(k + 1, cols[j]);
    }
  }
  return out;
}

Vector LogRatios(const LogRegModel& model, std::span<const double> v, double eps) {
  if (model.binary()) return {logit(v[0], eps)};
  Vector out(v.size() - 1);
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const double hi = std::clamp(v[k], eps, 1.0 - eps);
    const double lo = std::clamp(v[k + 1], eps, 1.0 - eps);
    out[k] = std::log(hi) - std::log(lo);
  }
  return out;
}

Vector Rhs(const LogRegModel& model, const VerticalPartition& part,
           std::span<const double> x_adv, const Vector& log_ratios) {
  const Matrix adv_diff = DiffRows(model, part.adv_indices());
  const Vector known = matvec(adv_diff, x_adv);
  Vector rhs(log_ratios.size());
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    double bias = 0.0;
    if (!model.bias.empty()) {
      bias = model.binary() ? model.bias[0] : model.bias[k] - model.bias[k + 1];
    }
    rhs[k] = log_ratios[k] - known[k] - bias;
  }
  return rhs;
}

}  // namespace

EsaProblem esa_problem(const LogRegModel& model, const VerticalPartition& part,
                       std::span<const double> x_adv, std::span<const double> v,
                       double eps) {
  model.validate();
  CheckShapes(model, part, x_adv, v);
  EsaProblem p;
  p.theta_target_diff = DiffRows(model, part.target_indices());
  p.log_ratios = LogRatios(model, v, eps);
  p.rhs = Rhs(model, part, x_adv, p.log_ratios);
  return p;
}

EsaSolver::EsaSolver(const LogRegModel& model, const VerticalPartition& part,
                     double rel_cutoff)
    : model_(&model), part_(&part) {
  model.validate();
  if (model.num_features() != part.total_features()) {
    throw ShapeError("esa: model/partition feature count mismatch");
  }
  if (part.num_target() == 0) throw InputError("esa: partition has no target features");
  theta_target_diff_ = DiffRows(model, part.target_indices());
  const auto data = theta_target_diff_.data();
  if (std::all_of(data.begin(), data.end(), [](double w) { return w == 0.0; })) {
    throw NumericError("esa: degenerate problem, every target weight difference is zero");
  }
  pinv_ = pinv(theta_target_diff_, rel_cutoff);
}

Vector EsaSolver::infer(std::span<const double> x_adv, std::span<const double> v) const {
  CheckShapes(*model_, *part_, x_adv, v);
  const Vector rhs = Rhs(*model_, *part_, x_adv, LogRatios(*model_, v, kDefaultLogitEps));
  return matvec(pinv_, rhs);
}

Matrix EsaSolver::infer_rows(const Matrix& x_adv, const Matrix& v) const {
  if (x_adv.rows() != v.rows()) throw ShapeError("esa: x_adv/v row mismatch");
  Matrix out(x_adv.rows(), part_->num_target());
  for (std::size_t r = 0; r < x_adv.rows(); ++r) out.set_row(r, infer(x_adv.row(r), v.row(r)));
  return out;
}

Vector esa(const LogRegModel& model, const VerticalPartition& part,
           std::span<const double> x_adv, std::span<const double> v, double rel_cutoff) {
  return EsaSolver(model, part, rel_cutoff).infer(x_adv, v);
}

}  // namespace vfl
