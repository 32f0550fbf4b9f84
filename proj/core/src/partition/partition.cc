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

#include "vfl/partition/partition.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "vfl/errors.h"

namespace vfl {

VerticalPartition VerticalPartition::FromTargetIndices(
    std::size_t total_features, std::vector<std::size_t> target_indices) {
  VerticalPartition p;
  p.owner_.assign(total_features, Owner::kAdversary);
  for (std::size_t idx : target_indices) {
    if (idx >= total_features) {
      throw InputError("partition: feature index " + std::to_string(idx) +
                       " out of range for d=" + std::to_string(total_features));
    }
    if (p.owner_[idx] == Owner::kTarget) {
      throw InputError("partition: duplicate feature index " + std::to_string(idx));
    }
    p.owner_[idx] = Owner::kTarget;
  }
  for (std::size_t j = 0; j < total_features; ++j) {
    (p.owner_[j] == Owner::kTarget ? p.target_ : p.adv_).push_back(j);
  }
  return p;
}

VerticalPartition VerticalPartition::FromAdversaryIndices(
    std::size_t total_features, std::vector<std::size_t> adv_indices) {
  std::vector<bool> is_adv(total_features, false);
  for (std::size_t idx : adv_indices) {
    if (idx >= total_features) {
      throw InputError("partition: feature index " + std::to_string(idx) +
                       " out of range for d=" + std::to_string(total_features));
    }
    if (is_adv[idx]) {
      throw InputError("partition: duplicate feature index " + std::to_string(idx));
    }
    is_adv[idx] = true;
  }
  std::vector<std::size_t> target;
  for (std::size_t j = 0; j < total_features; ++j) {
    if (!is_adv[j]) target.push_back(j);
  }
  return FromTargetIndices(total_features, std::move(target));
}

std::pair<Vector, Vector> VerticalPartition::split(std::span<const double> x) const {
  if (x.size() != total_features()) {
    throw ShapeError("split: vector length " + std::to_string(x.size()) +
                     ", partition has d=" + std::to_string(total_features()));
  }
  Vector adv(adv_.size());
  Vector target(target_.size());
  for (std::size_t i = 0; i < adv_.size(); ++i) adv[i] = x[adv_[i]];
  for (std::size_t i = 0; i < target_.size(); ++i) target[i] = x[target_[i]];
  return {std::move(adv), std::move(target)};
}

Vector VerticalPartition::assemble(std::span<const double> x_adv,
                                   std::span<const double> x_target) const {
  if (x_adv.size() != adv_.size() || x_target.size() != target_.size()) {
    throw ShapeError("assemble: got " + std::to_string(x_adv.size()) + "+" +
                     std::to_string(x_target.size()) + " values, partition expects " +
                     std::to_string(adv_.size()) + "+" + std::to_string(target_.size()));
  }
  Vector x(total_features());
  for (std::size_t i = 0; i < adv_.size(); ++i) x[adv_[i]] = x_adv[i];
  for (std::size_t i = 0; i < target_.size(); ++i) x[target_[i]] = x_target[i];
  return x;
}

std::pair<Matrix, Matrix> VerticalPartition::split_rows(const Matrix& x) const {
  if (x.cols() != total_features()) {
    throw ShapeError("split_rows: matrix has " + std::to_string(x.cols()) +
                     " columns, partition has d=" + std::to_string(total_features()));
  }
  Matrix adv(x.rows(), adv_.size());
  Matrix target(x.rows(), target_.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto src = x.row(r);
    for (std::size_t i = 0; i < adv_.size(); ++i) adv(r, i) = src[adv_[i]];
    for (std::size_t i = 0; i < target_.size(); ++i) target(r, i) = src[target_[i]];
  }
  return {std::move(adv), std::move(target)};
}

Matrix VerticalPartition::assemble_rows(const Matrix& x_adv, const Matrix& x_target) const {
  if (x_adv.rows() != x_target.rows() || x_adv.cols() != adv_.size() ||
      x_target.cols() != target_.size()) {
    throw ShapeError("assemble_rows: incompatible blocks for partition");
  }
  Matrix x(x_adv.rows(), total_features());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto dst = x.row(r);
    for (std::size_t i = 0; i < adv_.size(); ++i) dst[adv_[i]] = x_adv(r, i);
    for (std::size_t i = 0; i < target_.size(); ++i) dst[target_[i]] = x_target(r, i);
  }
  return x;
}

VerticalPartition sample_partition(std::size_t d, double frac_target, Rng& rng) {
  if (!(frac_target > 0.0 && frac_target < 1.0)) {
    throw InputError("sample_partition: frac_target must lie in (0, 1)");
  }
  const auto d_target =
      static_cast<std::size_t>(std::floor(frac_target * static_cast<double>(d) + 0.5));
  if (d_target == 0 || d_target >= d) {
    throw InputError("sample_partition: frac_target " + std::to_string(frac_target) +
                     " of d=" + std::to_string(d) + " leaves one side empty");
  }
  auto order = rng.permutation(d);
  order.resize(d_target);
  std::sort(order.begin(), order.end());
  return VerticalPartition::FromTargetIndices(d, std::move(order));
}

}  // namespace vfl
