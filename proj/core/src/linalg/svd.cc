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

#include "vfl/linalg/svd.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vfl/errors.h"

namespace vfl {
namespace {

// Jacobi on a tall matrix (rows >= cols). Works on columns, so operate on
// the transpose to keep the inner loops contiguous.
Svd TallSvd(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix ut = a.transposed();        // n x m, row j = column j of U*Sigma
  Matrix vt = Matrix::Identity(n);   // row j = column j of V

  const std::size_t max_sweeps = 100 * std::max(m, n);
  const double tol =
      std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(m, n));
  // Columns whose squared norm sits at roundoff level relative to ||A||_F are
  // numerically zero; rotating them against others never converges.
  const double frob2 = dot(a.data(), a.data());
  const double negligible = tol * tol * frob2;
  bool converged = false;
  for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        auto up = ut.row(p);
        auto uq = ut.row(q);
        const double alpha = dot(up, up);
        const double beta = dot(uq, uq);
        const double gamma = dot(up, uq);
        if (alpha <= negligible || beta <= negligible) continue;
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = up[i];
          const double y = uq[i];
          up[i] = c * x - s * y;
          uq[i] = s * x + c * y;
        }
        auto vp = vt.row(p);
        auto vq = vt.row(q);
        for (std::size_t i = 0; i < n; ++i) {
          const double x = vp[i];
          const double y = vq[i];
          vp[i] = c * x - s * y;
          vq[i] = s * x + c * y;
        }
      }
    }
  }
  if (!converged) {
    throw NumericError("svd: Jacobi sweeps did not converge within " +
                       std::to_string(max_sweeps) + " sweeps");
  }

  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(ut.row(j));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Svd out{Matrix(m, n), Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.singular_values[k] = sigma[j];
    const double inv = sigma[j] > 0.0 ? 1.0 / sigma[j] : 0.0;
    for (std::size_t i = 0; i < m; ++i) out.u(i, k) = ut(j, i) * inv;
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = vt(j, i);
  }
  return out;
}

}  // namespace

Svd svd(const Matrix& a) {
  if (a.empty()) throw InputError("svd: empty matrix");
  if (!a.all_finite()) throw NumericError("svd: non-finite input");
  if (a.rows() >= a.cols()) return TallSvd(a);
  Svd t = TallSvd(a.transposed());
  return Svd{std::move(t.v), std::move(t.singular_values), std::move(t.u)};
}

Matrix pinv(const Matrix& a, double rel_cutoff) {
  if (!(rel_cutoff > 0.0 && rel_cutoff < 1.0)) {
    throw InputError("pinv: rel_cutoff must lie in (0, 1)");
  }
  const Svd s = svd(a);
  const double sigma_max = s.singular_values.empty() ? 0.0 : s.singular_values[0];
  const double cutoff = rel_cutoff * sigma_max;

  // a+ = V * diag(1/sigma) * U^T, shape cols x rows.
  Matrix out(a.cols(), a.rows());
  for (std::size_t k = 0; k < s.singular_values.size(); ++k) {
    const double sigma = s.singular_values[k];
    if (sigma <= cutoff || sigma == 0.0) continue;
    const double inv = 1.0 / sigma;
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double vik = s.v(i, k) * inv;
      if (vik == 0.0) continue;
      auto dst = out.row(i);
      for (std::size_t j = 0; j < a.rows(); ++j) dst[j] += vik * s.u(j, k);
    }
  }
  if (!out.all_finite()) throw NumericError("pinv: non-finite result");
  return out;
}

}  // namespace vfl
