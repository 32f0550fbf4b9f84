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


#include "vfl/attacks/pra.h"

#include <algorithm>
#include <deque>
#include <limits>
#include <string>

#include "vfl/errors.h"

namespace vfl {

PraResult pra_candidates(const DecisionTree& tree, const VerticalPartition& part,
                         std::span<const double> x_adv, int observed_class) {
  if (tree.num_features != part.total_features()) {
    throw ShapeError("pra: tree has " + std::to_string(tree.num_features) +
                     " features, partition has " + std::to_string(part.total_features()));
  }
  if (x_adv.size() != part.num_adv()) throw ShapeError("pra: x_adv length mismatch");

  // Column in x_adv of every adversary-owned joint feature.
  std::vector<std::size_t> adv_pos(part.total_features(), 0);
  for (std::size_t j = 0; j < part.num_adv(); ++j) adv_pos[part.adv_indices()[j]] = j;

  const std::size_t n = tree.nodes.size();
  PraResult result;
  result.beta.assign(n, 0);
  result.alpha.assign(n, 0);
  result.beta[0] = 1;
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    if (!tree.is_internal(i)) continue;
    const TreeNode& node = tree.nodes[i];
    const auto f = static_cast<std::size_t>(node.feature);
    const std::size_t l = DecisionTree::left(i);
    const std::size_t r = DecisionTree::right(i);
    if (part.is_target(f)) {
      result.beta[l] = result.beta[i];
      result.beta[r] = result.beta[i];
    } else if (x_adv[adv_pos[f]] <= node.threshold) {
      result.beta[l] = result.beta[i];
      result.beta[r] = 0;
    } else {
      result.beta[l] = 0;
      result.beta[r] = result.beta[i];
    }
    queue.push_back(l);
    queue.push_back(r);
  }

  for (std::size_t leaf : reachable_leaves(tree)) {
    if (tree.nodes[leaf].label != observed_class) continue;
    result.alpha[leaf] = 1;
    if (result.beta[leaf] != 0) result.candidate_paths.push_back(path_to(leaf));
  }
  return result;
}

std::vector<BranchConstraint> path_constraints(const DecisionTree& tree,
                                               const VerticalPartition& part,
                                               std::span<const std::size_t> path) {
  std::vector<BranchConstraint> out;
  for (std::size_t step = 0; step + 1 < path.size(); ++step) {
    const std::size_t i = path[step];
    const TreeNode& node = tree.nodes.at(i);
    if (node.kind != NodeKind::kInternal) throw InputError("pra: path passes through a leaf");
    const auto f = static_cast<std::size_t>(node.feature);
    if (!part.is_target(f)) continue;
    out.push_back({f, node.threshold, path[step + 1] == DecisionTree::left(i)});
  }
  return out;
}

const std::vector<BranchConstraint>& pra_infer(PraResult& result, const DecisionTree& tree,
                                               const VerticalPartition& part, Rng& rng) {
  if (result.candidate_paths.empty()) {
    throw AttackInfeasibleError("pra: no prediction path is consistent with the observation");
  }
  const auto pick = rng.uniform_int(result.candidate_paths.size());
  result.chosen_path = result.candidate_paths[pick];
  result.constraints = path_constraints(tree, part, result.chosen_path);
  return result.constraints;
}

Vector pra_estimate(std::span<const BranchConstraint> constraints,
                    const VerticalPartition& part, double lo, double hi) {
  std::vector<std::size_t> target_pos(part.total_features(), 0);
  for (std::size_t j = 0; j < part.num_target(); ++j) target_pos[part.target_indices()[j]] = j;

  Vector lower(part.num_target(), lo);
  Vector upper(part.num_target(), hi);
  for (const auto& c : constraints) {
    if (!part.is_target(c.feature)) throw InputError("pra: constraint on a non-target feature");
    const std::size_t j = target_pos[c.feature];
    if (c.less_equal) {
      upper[j] = std::min(upper[j], c.threshold);
    } else {
      lower[j] = std::max(lower[j], c.threshold);
    }
  }
  Vector out(part.num_target());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = std::clamp(0.5 * (lower[j] + upper[j]), lo, hi);
  }
  return out;
}

}  // namespace vfl
