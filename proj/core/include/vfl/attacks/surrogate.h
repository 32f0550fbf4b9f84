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


#ifndef VFL_ATTACKS_SURROGATE_H_
#define VFL_ATTACKS_SURROGATE_H_

#include <cstddef>
#include <vector>

#include "vfl/linalg/matrix.h"
#include "vfl/linalg/rng.h"
#include "vfl/models/mlp.h"
#include "vfl/models/tree.h"

namespace vfl {

struct SurrogateConfig {
  std::size_t num_dummy = 10000;
  // Held-out dummy samples used only to measure agreement.
  std::size_t num_holdout = 2000;
  std::vector<std::size_t> hidden = {2000, 200};
  // Optimiser settings; `hidden` and `head` are overridden (softmax head).
  MlpTrainConfig train;
};

// max(10 n, 10000) for n prediction samples.
std::size_t default_dummy_count(std::size_t n);

// n x d matrix of i.i.d. Uniform[0, 1) entries.
Matrix dummy_samples(std::size_t n, std::size_t d, Rng& rng);

struct SurrogateResult {
  MlpModel surrogate;
  // Fraction of held-out dummies where the surrogate's top class is one of
  // the forest's top (possibly tied) classes.
  double agreement = 0.0;
};

// Fits a softmax MLP to the forest's confidence vectors on uniform dummy
// inputs (soft-target cross-entropy unless `train.loss` selects MSE).
SurrogateResult distill_rf(const RandomForest& forest, std::size_t d,
                           const SurrogateConfig& cfg, Rng& rng);

// Top-class agreement between a model output matrix and reference vectors.
double top_class_agreement(const Matrix& predicted, const Matrix& reference);

}  // namespace vfl

#endif  // VFL_ATTACKS_SURROGATE_H_
