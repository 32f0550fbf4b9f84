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


#ifndef VFL_ATTACKS_BASELINES_H_
#define VFL_ATTACKS_BASELINES_H_

#include <cstddef>

#include "vfl/linalg/matrix.h"
#include "vfl/linalg/rng.h"

namespace vfl {

inline constexpr double kGaussianBaselineMean = 0.5;
inline constexpr double kGaussianBaselineStddev = 0.25;

// Random guesses that ignore the model entirely.
// Uniform: i.i.d. U(0, 1). Gaussian: i.i.d. N(0.5, 0.25^2) clamped into [0, 1].
Vector baseline_uniform(std::size_t d_target, Rng& rng);
Vector baseline_gaussian(std::size_t d_target, Rng& rng);
Matrix baseline_uniform_rows(std::size_t n, std::size_t d_target, Rng& rng);
Matrix baseline_gaussian_rows(std::size_t n, std::size_t d_target, Rng& rng);

}  // namespace vfl

#endif  // VFL_ATTACKS_BASELINES_H_
