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

#ifndef VFL_LINALG_SVD_H_
#define VFL_LINALG_SVD_H_

#include "vfl/linalg/matrix.h"

namespace vfl {

// Thin SVD a = u * diag(singular_values) * v^T with k = min(rows, cols).
// u is rows x k, v is cols x k, singular values sorted descending.
struct Svd {
  Matrix u;
  Vector singular_values;
  Matrix v;
};

// One-sided (Hestenes) Jacobi SVD. Sweeps are capped at
// 100 * max(rows, cols); exceeding the cap throws NumericError.
Svd svd(const Matrix& a);

inline constexpr double kDefaultPinvCutoff = 1e-12;

// Moore-Penrose pseudo-inverse. Singular values below
// rel_cutoff * sigma_max are treated as zero.
Matrix pinv(const Matrix& a, double rel_cutoff = kDefaultPinvCutoff);

}  // namespace vfl

#endif  // VFL_LINALG_SVD_H_
