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


// Independent reference implementations used only by the tests. They are
// deliberately naive so that they share no code path with the library.

#ifndef VFL_TESTS_SUPPORT_ORACLES_H_
#define VFL_TESTS_SUPPORT_ORACLES_H_

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vfl/linalg/matrix.h"
#include "vfl/linalg/rng.h"
#include "vfl/models/logreg.h"
#include "vfl/models/tree.h"
#include "vfl/partition/partition.h"

namespace vfl::testing {

inline Matrix RandomMatrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                           double hi = 1.0) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
  }
  return m;
}

inline Vector RandomVector(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline Matrix TripleLoopMatmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

// Gaussian elimination with partial pivoting on a square system.
inline Vector SolveDense(std::vector<std::vector<double>> a, Vector b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    if (a[col][col] == 0.0) throw std::runtime_error("singular system");
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// Ridge solution (A^T A + lambda I)^-1 A^T b, evaluated through the
// equivalent A^T (A A^T + lambda I)^-1 b when A is wide. As lambda -> 0 this
// tends to the minimum-norm least-squares solution.
inline Vector RidgeSolve(const Matrix& a, std::span<const double> b, double lambda) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m <= n) {
    std::vector<std::vector<double>> g(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < n; ++k) g[i][j] += a(i, k) * a(j, k);
      }
      g[i][i] += lambda;
    }
    const Vector y = SolveDense(g, Vector(b.begin(), b.end()));
    Vector x(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < m; ++i) x[k] += a(i, k) * y[i];
    }
    return x;
  }
  std::vector<std::vector<double>> g(n, std::vector<double>(n, 0.0));
  Vector rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < m; ++k) g[i][j] += a(k, i) * a(k, j);
    }
    g[i][i] += lambda;
    for (std::size_t k = 0; k < m; ++k) rhs[i] += a(k, i) * b[k];
  }
  return SolveDense(g, rhs);
}

// Central finite difference of f around every entry of `params`.
inline Vector FiniteDifference(std::span<double> params, const std::function<double()>& f,
                               double h = 1e-6) {
  Vector grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = f();
    params[i] = saved - h;
    const double down = f();
    params[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// max |a - b| / max(|a|, |b|, floor) over entries.
inline double MaxRelativeError(std::span<const double> a, std::span<const double> b,
                               double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

// Every root-to-leaf path of the tree, found by recursion from the root.
inline void EnumeratePaths(const DecisionTree& tree, std::size_t node,
                           std::vector<std::size_t>& prefix,
                           std::vector<std::vector<std::size_t>>& out) {
  prefix.push_back(node);
  if (tree.nodes[node].kind == NodeKind::kInternal) {
    EnumeratePaths(tree, 2 * node + 1, prefix, out);
    EnumeratePaths(tree, 2 * node + 2, prefix, out);
  } else {
    out.push_back(prefix);
  }
  prefix.pop_back();
}

// Paths ending in a leaf labelled `k` whose every adversary-owned comparison
// agrees with the adversary's feature values.
inline std::vector<std::vector<std::size_t>> BruteForceCandidates(const DecisionTree& tree,
                                                                  const VerticalPartition& part,
                                                                  std::span<const double> x_full,
                                                                  int k) {
  std::vector<std::vector<std::size_t>> all;
  std::vector<std::size_t> prefix;
  EnumeratePaths(tree, 0, prefix, all);
  std::vector<std::vector<std::size_t>> out;
  for (const auto& path : all) {
    if (tree.nodes[path.back()].label != k) continue;
    bool ok = true;
    for (std::size_t s = 0; s + 1 < path.size() && ok; ++s) {
      const TreeNode& node = tree.nodes[path[s]];
      const auto f = static_cast<std::size_t>(node.feature);
      if (part.is_target(f)) continue;
      const bool goes_left = x_full[f] <= node.threshold;
      ok = goes_left == (path[s + 1] == 2 * path[s] + 1);
    }
    if (ok) out.push_back(path);
  }
  return out;
}

// Random complete tree of the given depth: internal nodes split a random
// feature at a random threshold in (0, 1); with probability `leaf_prob` a
// node becomes an early leaf and its subtree is filled with replicas.
inline DecisionTree RandomTree(int depth, std::size_t d, int classes, Rng& rng,
                               double leaf_prob = 0.2) {
  DecisionTree t;
  t.depth = depth;
  t.num_classes = classes;
  t.num_features = d;
  t.nodes.assign(DecisionTree::capacity(depth), TreeNode{});
  std::vector<int> node_depth(t.nodes.size(), 0);
  std::vector<bool> replica(t.nodes.size(), false);
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    if (i > 0) {
      node_depth[i] = node_depth[(i - 1) / 2] + 1;
      const std::size_t p = (i - 1) / 2;
      if (replica[p] || t.nodes[p].kind == NodeKind::kLeaf) {
        replica[i] = true;
        t.nodes[i] = TreeNode{NodeKind::kReplica, -1, 0.0, t.nodes[p].label};
        continue;
      }
    }
    const bool leaf = node_depth[i] == depth || (i > 0 && rng.uniform() < leaf_prob);
    if (leaf) {
      t.nodes[i] = TreeNode{NodeKind::kLeaf, -1, 0.0,
                            static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(classes)))};
    } else {
      t.nodes[i] = TreeNode{NodeKind::kInternal, static_cast<int>(rng.uniform_int(d)),
                            rng.uniform(0.05, 0.95), 0};
    }
  }
  return t;
}

// The worked three-class model: features (age, income, deposit, shopping),
// the adversary holding the first two.
inline LogRegModel ThreeClassExampleModel() {
  LogRegModel m;
  m.num_classes = 3;
  m.weights = Matrix::FromRows({{0.08, 0.0002, 0.0005, 0.09},
                                {0.06, 0.0005, 0.0002, 0.08},
                                {0.01, 0.0001, 0.0004, 0.05}});
  return m;
}

// Depth-3 tree over (age, income, deposit, shopping):
//   0: age <= 30            -> 1 / 2
//   1: deposit <= 5000      -> 3 / 4
//   2: income <= 3000       -> 5 / 6
//   3: income <= 5000       -> 7 / 8
//   4: leaf 1, 5: leaf 0, 6: leaf 1, 7: leaf 0, 8: leaf 1
// The adversary holds age and income.
inline DecisionTree BranchingExampleTree() {
  DecisionTree t;
  t.depth = 3;
  t.num_classes = 2;
  t.num_features = 4;
  t.nodes.assign(15, TreeNode{});
  t.nodes[0] = {NodeKind::kInternal, 0, 30.0, 0};
  t.nodes[1] = {NodeKind::kInternal, 2, 5000.0, 0};
  t.nodes[2] = {NodeKind::kInternal, 1, 3000.0, 0};
  t.nodes[3] = {NodeKind::kInternal, 1, 5000.0, 0};
  t.nodes[4] = {NodeKind::kLeaf, -1, 0.0, 1};
  t.nodes[5] = {NodeKind::kLeaf, -1, 0.0, 0};
  t.nodes[6] = {NodeKind::kLeaf, -1, 0.0, 1};
  t.nodes[7] = {NodeKind::kLeaf, -1, 0.0, 0};
  t.nodes[8] = {NodeKind::kLeaf, -1, 0.0, 1};
  for (std::size_t i : {9, 10}) t.nodes[i] = {NodeKind::kReplica, -1, 0.0, 1};
  for (std::size_t i : {11, 12}) t.nodes[i] = {NodeKind::kReplica, -1, 0.0, 0};
  for (std::size_t i : {13, 14}) t.nodes[i] = {NodeKind::kReplica, -1, 0.0, 1};
  return t;
}

}  // namespace vfl::testing

#endif  // VFL_TESTS_SUPPORT_ORACLES_H_
