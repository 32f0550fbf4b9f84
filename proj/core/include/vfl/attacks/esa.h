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


#ifndef VFL_ATTACKS_ESA_H_
#define VFL_ATTACKS_ESA_H_

#include <span>

#include "vfl/linalg/activations.h"
#include "vfl/linalg/matrix.h"
#include "vfl/linalg/svd.h"
#include "vfl/models/logreg.h"
#include "vfl/partition/partition.h"

namespace vfl {

// Linear system theta_target_diff * x_target = rhs recovered from one
// logistic-regression prediction.
//
// Multiclass: row k is theta_target(k) - theta_target(k+1) and
//   rhs_k = (ln v_k - ln v_{k+1}) - (theta_adv(k) - theta_adv(k+1)) . x_adv
//           - (b_k - b_{k+1}).
// Binary: a single row theta_target and rhs = logit(v_0) - theta_adv . x_adv - b_0.
struct EsaProblem {
  Matrix theta_target_diff;
  Vector log_ratios;  // ln v_k - ln v_{k+1}, or logit(v_0) for binary models
  Vector rhs;
};

// Confidence entries are clamped into [eps, 1 - eps] before taking logs.
EsaProblem esa_problem(const LogRegModel& model, const VerticalPartition& part,
                       std::span<const double> x_adv, std::span<const double> v,
                       double eps = kDefaultLogitEps);

// Solves many samples against one (model, partition) pair, computing the
// pseudo-inverse only once.
class EsaSolver {
 public:
  // Throws InputError when the partition has no target features and
  // NumericError when every target weight is zero (nothing to solve for).
  EsaSolver(const LogRegModel& model, const VerticalPartition& part,
            double rel_cutoff = kDefaultPinvCutoff);

  const Matrix& theta_target_diff() const { return theta_target_diff_; }
  const Matrix& pseudo_inverse() const { return pinv_; }

  Vector infer(std::span<const double> x_adv, std::span<const double> v) const;
  // One inferred row per row of (x_adv, v).
  Matrix infer_rows(const Matrix& x_adv, const Matrix& v) const;

 private:
  const LogRegModel* model_;
  const VerticalPartition* part_;
  Matrix theta_target_diff_;
  Matrix pinv_;
};

// Minimum-norm least-squares estimate of x_target.
Vector esa(const LogRegModel& model, const VerticalPartition& part,
           std::span<const double> x_adv, std::span<const double> v,
           double rel_cutoff = kDefaultPinvCutoff);

}  // namespace vfl

#endif  // VFL_ATTACKS_ESA_H_
