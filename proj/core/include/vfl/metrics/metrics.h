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


#ifndef VFL_METRICS_METRICS_H_
#define VFL_METRICS_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vfl/attacks/pra.h"
#include "vfl/linalg/matrix.h"
#include "vfl/models/tree.h"
#include "vfl/partition/partition.h"

namespace vfl {

struct AttackScore {
  // (1 / (n d_target)) sum_t sum_i (x_hat - x)^2
  double mse = 0.0;
  // Column means of the squared error; their average equals mse.
  Vector per_feature_mse;
  std::optional<double> cbr;
};

// Throws ShapeError unless both matrices are the same non-empty shape.
AttackScore mse_per_feature(const Matrix& inferred, const Matrix& truth);

// Matched / total target-owned branch comparisons.
struct CbrCounts {
  std::size_t matches = 0;
  std::size_t comparisons = 0;

  // Empty when no target-owned comparison was made.
  std::optional<double> rate() const;
  CbrCounts& operator+=(const CbrCounts& other);
};

// Walks the true prediction path of every sample in every tree and, at each
// target-owned node, checks whether the inferred value branches the same way
// as the true one. Rows of x_adv / inferred / truth are aligned samples;
// inferred and truth hold target features only.
CbrCounts cbr_counts(std::span<const DecisionTree> trees, const VerticalPartition& part,
                     const Matrix& x_adv, const Matrix& inferred, const Matrix& truth);
std::optional<double> cbr(std::span<const DecisionTree> trees, const VerticalPartition& part,
                          const Matrix& x_adv, const Matrix& inferred, const Matrix& truth);
std::optional<double> cbr(const DecisionTree& tree, const VerticalPartition& part,
                          const Matrix& x_adv, const Matrix& inferred, const Matrix& truth);

// Path-restriction scoring: each constraint of the chosen path checked
// against the true target values (target-feature order) of that sample.
CbrCounts pra_cbr_counts(std::span<const BranchConstraint> constraints,
                         const VerticalPartition& part, std::span<const double> truth_target);

// (1 / (n d_target)) sum sum 2 x^2. Throws InputError for entries outside
// [0, 1] and ShapeError for an empty matrix.
double mse_upper_bound(const Matrix& truth);

struct Correlation {
  double value = 0.0;
  // Set when a zero-variance column forced a coefficient to 0.
  bool degenerate = false;
};

// Pearson coefficient; 0 with degenerate set when either side is constant.
// Throws InputError for fewer than two samples or unequal lengths.
Correlation pearson_checked(std::span<const double> a, std::span<const double> b);
double pearson(std::span<const double> a, std::span<const double> b);

// Mean over columns of |pearson(column, target_col)|.
Correlation corr_adv(const Matrix& adv_cols, std::span<const double> target_col);
Correlation corr_v(const Matrix& v_cols, std::span<const double> target_col);

// Raw per-target-feature (mse, corr_adv, corr_v) triples.
struct FeatureDiagnostic {
  std::size_t feature = 0;  // joint feature index
  double mse = 0.0;
  double corr_adv = 0.0;
  double corr_v = 0.0;
};

std::vector<FeatureDiagnostic> feature_diagnostics(const VerticalPartition& part,
                                                   const Matrix& x_adv,
                                                   const Matrix& confidences,
                                                   const Matrix& inferred,
                                                   const Matrix& truth);

}  // namespace vfl

#endif  // VFL_METRICS_METRICS_H_
