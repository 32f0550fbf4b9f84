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

#ifndef VFL_MODELS_LOGREG_H_
#define VFL_MODELS_LOGREG_H_

#include <cstdint>
#include <span>

#include "vfl/data/dataset.h"
#include "vfl/linalg/matrix.h"

namespace vfl {

// Logistic regression with no intercept unless `bias` is non-empty.
//
// Binary models store a single weight row theta and emit
// (sigmoid(theta.x), 1 - sigmoid(theta.x)); class 0 is the first score.
// Multiclass models store one row per class and emit softmax(Theta x).
struct LogRegModel {
  int num_classes = 2;
  Matrix weights;
  Vector bias;

  bool binary() const { return weights.rows() == 1; }
  std::size_t num_features() const { return weights.cols(); }
  // Throws InputError when shapes are inconsistent.
  void validate() const;
};

struct LogRegConfig {
  double learning_rate = 0.1;
  double momentum = 0.9;
  int epochs = 100;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  // Binary problems get a single weight row; false forces c rows of softmax.
  bool binary_single_row = true;
  bool fit_bias = false;
  double weight_decay = 0.0;
};

// Mini-batch SGD on softmax (or sigmoid) cross-entropy from a zero start.
LogRegModel train_logreg(const Dataset& data, const LogRegConfig& cfg);

Vector predict_logreg(const LogRegModel& model, std::span<const double> x);
Matrix predict_logreg_rows(const LogRegModel& model, const Matrix& x);

struct LogRegGradient {
  double loss = 0.0;
  Matrix weights;
  Vector bias;
};

// Mean cross-entropy over the batch and its gradient.
LogRegGradient logreg_loss_and_grad(const LogRegModel& model, const Matrix& x,
                                    std::span<const int> labels);

// d loss / d x given d loss / d v for each row of x.
Matrix logreg_input_grad(const LogRegModel& model, const Matrix& x,
                         const Matrix& grad_scores);

}  // namespace vfl

#endif  // VFL_MODELS_LOGREG_H_
