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

#ifndef VFL_MODELS_TREE_H_
#define VFL_MODELS_TREE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "vfl/data/dataset.h"
#include "vfl/linalg/matrix.h"
#include "vfl/linalg/rng.h"

namespace vfl {

enum class NodeKind : std::uint8_t {
  kInternal,
  kLeaf,
  // Slot below an early leaf, filled with a copy of that leaf's label so the
  // array is a complete binary tree. Never visited by prediction.
  kReplica,
};

struct TreeNode {
  NodeKind kind = NodeKind::kLeaf;
  int feature = -1;
  double threshold = 0.0;
  int label = 0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// CART tree stored as a complete binary tree of 2^(depth+1) - 1 slots.
// Children of slot i are 2i+1 (feature <= threshold) and 2i+2 (otherwise).
struct DecisionTree {
  int depth = 0;
  int num_classes = 2;
  std::size_t num_features = 0;
  std::vector<TreeNode> nodes;

  static std::size_t capacity(int depth) {
    return (std::size_t{1} << (depth + 1)) - 1;
  }
  static std::size_t left(std::size_t i) { return 2 * i + 1; }
  static std::size_t right(std::size_t i) { return 2 * i + 2; }
  static std::size_t parent(std::size_t i) { return (i - 1) / 2; }

  bool is_internal(std::size_t i) const { return nodes[i].kind == NodeKind::kInternal; }
  bool is_leaf(std::size_t i) const { return nodes[i].kind == NodeKind::kLeaf; }

  // Throws InputError when the layout or reachability invariants fail.
  void validate() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct TreeConfig {
  int max_depth = 5;
  std::size_t min_leaf = 1;
  // Features considered per split; 0 means all of them.
  std::size_t max_features = 0;
  std::uint64_t seed = 0;
};

DecisionTree train_tree(const Dataset& data, const TreeConfig& cfg);

struct TreePrediction {
  int label = 0;
  std::vector<std::size_t> path;  // starts at 0, ends at the leaf
};

TreePrediction predict_tree(const DecisionTree& tree, std::span<const double> x);
// One-hot confidence vector of length num_classes.
Vector predict_tree_scores(const DecisionTree& tree, std::span<const double> x);

// Gini impurity 1 - sum p_k^2 of a class histogram.
double gini(std::span<const std::size_t> class_counts);

// Slot indices of every reachable leaf, ascending.
std::vector<std::size_t> reachable_leaves(const DecisionTree& tree);
// Root-to-node slot sequence.
std::vector<std::size_t> path_to(std::size_t node);

struct RandomForest {
  int num_classes = 2;
  std::vector<DecisionTree> trees;

  std::size_t num_features() const { return trees.empty() ? 0 : trees.front().num_features; }
  void validate() const;
};

struct ForestConfig {
  int num_trees = 100;
  int max_depth = 3;
  std::size_t min_leaf = 1;
  // 0 selects ceil(sqrt(d)) features per split.
  std::size_t max_features = 0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

RandomForest train_forest(const Dataset& data, const ForestConfig& cfg);
// v_k = (number of trees voting k) / W.
Vector predict_forest(const RandomForest& forest, std::span<const double> x);

}  // namespace vfl

#endif  // VFL_MODELS_TREE_H_
