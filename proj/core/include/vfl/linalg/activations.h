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

#ifndef VFL_LINALG_ACTIVATIONS_H_
#define VFL_LINALG_ACTIVATIONS_H_

#include <span>

#include "vfl/linalg/matrix.h"

namespace vfl {

inline constexpr double kDefaultLogitEps = 1e-12;

double sigmoid(double x);
// Inverse sigmoid; v is clamped into [eps, 1 - eps] first.
double logit(double v, double eps = kDefaultLogitEps);

// Max-shifted softmax. Throws InputError on an empty input.
Vector softmax(std::span<const double> z);
// In-place softmax of every row.
void softmax_rows(Matrix& z);

}  // namespace vfl

#endif  // VFL_LINALG_ACTIVATIONS_H_
