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

#include "vfl/linalg/activations.h"

#include <algorithm>
#include <cmath>

#include "vfl/errors.h"

namespace vfl {
namespace {

void SoftmaxInPlace(std::span<double> z) {
  const double shift = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - shift);
    total += v;
  }
  for (double& v : z) v /= total;
}

}  // namespace

double sigmoid(double x) {
  // Branch keeps exp() from overflowing for large |x|.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double v, double eps) {
  const double p = std::clamp(v, eps, 1.0 - eps);
  return std::log(p) - std::log1p(-p);
}

Vector softmax(std::span<const double> z) {
  if (z.empty()) throw InputError("softmax: empty input");
  Vector out(z.begin(), z.end());
  SoftmaxInPlace(out);
  return out;
}

void softmax_rows(Matrix& z) {
  if (z.cols() == 0) throw InputError("softmax_rows: zero columns");
  for (std::size_t r = 0; r < z.rows(); ++r) SoftmaxInPlace(z.row(r));
}

}  // namespace vfl
