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


#include "vfl/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "vfl/errors.h"

namespace vfl {
namespace {

void CheckSameShape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

Correlation MeanAbsCorrelation(const Matrix& cols, std::span<const double> target) {
  if (cols.cols() == 0) throw InputError("correlation: no columns");
  if (cols.rows() != target.size()) throw ShapeError("correlation: length mismatch");
  Correlation out;
  for (std::size_t j = 0; j < cols.cols(); ++j) {
    const Correlation r = pearson_checked(cols.col_vector(j), target);
    out.value += std::abs(r.value);
    out.degenerate = out.degenerate || r.degenerate;
  }
  out.value /= static_cast<double>(cols.cols());
  return out;
}

}  // namespace

AttackScore mse_per_feature(const Matrix& inferred, const Matrix& truth) {
  CheckSameShape(inferred, truth, "mse_per_feature");
  if (truth.rows() == 0 || truth.cols() == 0) throw ShapeError("mse_per_feature: empty input");
  AttackScore score;
  score.per_feature_mse.assign(truth.cols(), 0.0);
  for (std::size_t r = 0; r < truth.rows(); ++r) {
    for (std::size_t j = 0; j < truth.cols(); ++j) {
      const double e = inferred(r, j) - truth(r, j);
      score.per_feature_mse[j] += e * e;
    }
  }
  for (double& m : score.per_feature_mse) {
    m /= static_cast<double>(truth.rows());
    score.mse += m;
  }
  score.mse /= static_cast<double>(truth.cols());
  return score;
}

std::optional<double> CbrCounts::rate() const {
  if (comparisons == 0) return std::nullopt;
  return static_cast<double>(matches) / static_cast<double>(comparisons);
}

CbrCounts& CbrCounts::operator+=(const CbrCounts& other) {
  matches += other.matches;
  comparisons += other.comparisons;
  return *this;
}

CbrCounts cbr_counts(std::span<const DecisionTree> trees, const VerticalPartition& part,
                     const Matrix& x_adv, const Matrix& inferred, const Matrix& truth) {
  CheckSameShape(inferred, truth, "cbr");
  if (truth.cols() != part.num_target()) throw ShapeError("cbr: truth width != d_target");
  if (x_adv.rows() != truth.rows() || x_adv.cols() != part.num_adv()) {
    throw ShapeError("cbr: x_adv shape mismatch");
  }
  std::vector<std::size_t> target_pos(part.total_features(), 0);
  for (std::size_t j = 0; j < part.num_target(); ++j) target_pos[part.target_indices()[j]] = j;

  CbrCounts counts;
  for (std::size_t r = 0; r < truth.rows(); ++r) {
    const Vector joint = part.assemble(x_adv.row(r), truth.row(r));
    for (const DecisionTree& tree : trees) {
      if (tree.num_features != part.total_features()) {
        throw ShapeError("cbr: tree feature count mismatch");
      }
      const TreePrediction pred = predict_tree(tree, joint);
      for (std::size_t step = 0; step + 1 < pred.path.size(); ++step) {
        const TreeNode& node = tree.nodes[pred.path[step]];
        const auto f = static_cast<std::size_t>(node.feature);
        if (!part.is_target(f)) continue;
        const std::size_t j = target_pos[f];
        const bool true_left = truth(r, j) <= node.threshold;
        const bool inferred_left = inferred(r, j) <= node.threshold;
        ++counts.comparisons;
        if (true_left == inferred_left) ++counts.matches;
      }
    }
  }
  return counts;
}

std::optional<double> cbr(std::span<const DecisionTree> trees, const VerticalPartition& part,
                          const Matrix& x_adv, const Matrix& inferred, const Matrix& truth) {
  return cbr_counts(trees, part, x_adv, inferred, truth).rate();
}

std::optional<double> cbr(const DecisionTree& tree, const VerticalPartition& part,
                          const Matrix& x_adv, const Matrix& inferred, const Matrix& truth) {
  return cbr(std::span<const DecisionTree>(&tree, 1), part, x_adv, inferred, truth);
}

CbrCounts pra_cbr_counts(std::span<const BranchConstraint> constraints,
                         const VerticalPartition& part, std::span<const double> truth_target) {
  if (truth_target.size() != part.num_target()) throw ShapeError("pra_cbr: truth width");
  std::vector<std::size_t> target_pos(part.total_features(), 0);
  for (std::size_t j = 0; j < part.num_target(); ++j) target_pos[part.target_indices()[j]] = j;
  CbrCounts counts;
  for (const auto& c : constraints) {
    if (!part.is_target(c.feature)) throw InputError("pra_cbr: constraint on a non-target feature");
    ++counts.comparisons;
    if (c.satisfied_by(truth_target[target_pos[c.feature]])) ++counts.matches;
  }
  return counts;
}

double mse_upper_bound(const Matrix& truth) {
  if (truth.rows() == 0 || truth.cols() == 0) throw ShapeError("mse_upper_bound: empty input");
  double sum = 0.0;
  for (double x : truth.data()) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw InputError("mse_upper_bound: entries must be normalised into [0, 1], got " +
                       std::to_string(x));
    }
    sum += 2.0 * x * x;
  }
  return sum / static_cast<double>(truth.rows() * truth.cols());
}

Correlation pearson_checked(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("pearson: length mismatch");
  if (a.size() < 2) throw InputError("pearson: need at least two samples");
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return {0.0, true};
  const double r = sab / std::sqrt(saa * sbb);
  return {std::clamp(r, -1.0, 1.0), false};
}

double pearson(std::span<const double> a, std::span<const double> b) {
  return pearson_checked(a, b).value;
}

Correlation corr_adv(const Matrix& adv_cols, std::span<const double> target_col) {
  return MeanAbsCorrelation(adv_cols, target_col);
}

Correlation corr_v(const Matrix& v_cols, std::span<const double> target_col) {
  return MeanAbsCorrelation(v_cols, target_col);
}

std::vector<FeatureDiagnostic> feature_diagnostics(const VerticalPartition& part,
                                                   const Matrix& x_adv,
                                                   const Matrix& confidences,
                                                   const Matrix& inferred,
                                                   const Matrix& truth) {
  const AttackScore score = mse_per_feature(inferred, truth);
  if (truth.cols() != part.num_target()) throw ShapeError("diagnostics: truth width");
  std::vector<FeatureDiagnostic> out;
  for (std::size_t j = 0; j < truth.cols(); ++j) {
    const Vector col = truth.col_vector(j);
    out.push_back({part.target_indices()[j], score.per_feature_mse[j],
                   corr_adv(x_adv, col).value, corr_v(confidences, col).value});
  }
  return out;
}

}  // namespace vfl
