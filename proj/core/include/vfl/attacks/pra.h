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


#ifndef VFL_ATTACKS_PRA_H_
#define VFL_ATTACKS_PRA_H_

#include <cstdint>
#include <span>
#include <vector>

#include "vfl/linalg/matrix.h"
#include "vfl/linalg/rng.h"
#include "vfl/models/tree.h"
#include "vfl/partition/partition.h"

namespace vfl {

// "x[feature] <= threshold" when less_equal, otherwise "x[feature] > threshold".
// `feature` is a column of the full (joint) feature ordering.
struct BranchConstraint {
  std::size_t feature = 0;
  double threshold = 0.0;
  bool less_equal = true;

  bool satisfied_by(double value) const {
    return less_equal ? value <= threshold : value > threshold;
  }
  friend bool operator==(const BranchConstraint&, const BranchConstraint&) = default;
};

struct PraResult {
  // Per-slot indicators over the complete binary layout.
  // beta: slots reachable given the adversary's own comparisons.
  // alpha: reachable leaves whose label is the observed class.
  std::vector<std::uint8_t> beta;
  std::vector<std::uint8_t> alpha;
  // Root-to-leaf slot sequences whose leaf survives alpha * beta, ordered by
  // leaf index.
  std::vector<std::vector<std::size_t>> candidate_paths;
  // Filled in by pra_infer().
  std::vector<std::size_t> chosen_path;
  std::vector<BranchConstraint> constraints;
};

// Breadth-first restriction of the tree: adversary-owned internal nodes keep
// only the child their own value selects, target-owned internal nodes keep
// both, leaves and replica slots propagate nothing. O(number of slots).
PraResult pra_candidates(const DecisionTree& tree, const VerticalPartition& part,
                         std::span<const double> x_adv, int observed_class);

// Picks one candidate uniformly at random and records the constraints it
// implies on target-owned features. Throws AttackInfeasibleError when there
// is no candidate.
const std::vector<BranchConstraint>& pra_infer(PraResult& result, const DecisionTree& tree,
                                               const VerticalPartition& part, Rng& rng);

// Constraints on target-owned features along `path`.
std::vector<BranchConstraint> path_constraints(const DecisionTree& tree,
                                               const VerticalPartition& part,
                                               std::span<const std::size_t> path);

// Point estimate of x_target: the midpoint of the interval each target
// feature is confined to, intersected with [lo, hi]. Unconstrained features
// get (lo + hi) / 2.
Vector pra_estimate(std::span<const BranchConstraint> constraints,
                    const VerticalPartition& part, double lo = 0.0, double hi = 1.0);

}  // namespace vfl

#endif  // VFL_ATTACKS_PRA_H_
