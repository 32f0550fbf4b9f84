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


#include "vfl/attacks/baselines.h"

#include <algorithm>

#include "vfl/errors.h"

namespace vfl {
namespace {

void CheckWidth(std::size_t d_target) {
  if (d_target == 0) throw InputError("baseline: d_target must be at least 1");
}

}  // namespace

Vector baseline_uniform(std::size_t d_target, Rng& rng) {
  CheckWidth(d_target);
  Vector out(d_target);
  for (double& x : out) x = rng.uniform();
  return out;
}

Vector baseline_gaussian(std::size_t d_target, Rng& rng) {
  CheckWidth(d_target);
  Vector out(d_target);
  for (double& x : out) {
    x = std::clamp(rng.normal(kGaussianBaselineMean, kGaussianBaselineStddev), 0.0, 1.0);
  }
  return out;
}

Matrix baseline_uniform_rows(std::size_t n, std::size_t d_target, Rng& rng) {
  Matrix out(n, d_target);
  for (std::size_t r = 0; r < n; ++r) out.set_row(r, baseline_uniform(d_target, rng));
  return out;
}

Matrix baseline_gaussian_rows(std::size_t n, std::size_t d_target, Rng& rng) {
  Matrix out(n, d_target);
  for (std::size_t r = 0; r < n; ++r) out.set_row(r, baseline_gaussian(d_target, rng));
  return out;
}

}  // namespace vfl
