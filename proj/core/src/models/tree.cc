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

#include "vfl/models/tree.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vfl/errors.h"

namespace vfl {
namespace {

constexpr double kImpurityTol = 1e-12;

struct BuildNode {
  bool leaf = true;
  int feature = -1;
  double threshold = 0.0;
  int label = 0;
  int left = -1;
  int right = -1;
};

struct Split {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const TreeConfig& cfg)
      : data_(data), cfg_(cfg), rng_(cfg.seed), classes_(data.num_classes) {}

  int Build(std::vector<std::size_t>& rows, int depth) {
    std::vector<std::size_t> counts(classes_, 0);
    for (std::size_t r : rows) ++counts[static_cast<std::size_t>(data_.labels[r])];
    const int label = static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    const double parent_gini = gini(counts);

    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(BuildNode{true, -1, 0.0, label, -1, -1});
    max_depth_ = std::max(max_depth_, depth);

    if (depth >= cfg_.max_depth || parent_gini <= kImpurityTol ||
        rows.size() < 2 * std::max<std::size_t>(cfg_.min_leaf, 1)) {
      return id;
    }
    const Split best = FindSplit(rows, counts);
    if (!best.found || best.score >= parent_gini - kImpurityTol) return id;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (std::size_t r : rows) {
      (data_.features(r, best.feature) <= best.threshold ? left_rows : right_rows).push_back(r);
    }
    const int left = Build(left_rows, depth + 1);
    const int right = Build(right_rows, depth + 1);
    nodes_[id] = BuildNode{false, static_cast<int>(best.feature), best.threshold, label, left,
                           right};
    return id;
  }

  DecisionTree Materialize() {
    // max_depth_ counts every node visited, but a node at the depth limit is
    // always a leaf, so it equals the deepest leaf.
    DecisionTree tree;
    tree.depth = max_depth_;
    tree.num_classes = classes_;
    tree.num_features = data_.num_features();
    tree.nodes.assign(DecisionTree::capacity(max_depth_), TreeNode{});
    Place(tree, 0, 0);
    return tree;
  }

 private:
  std::vector<std::size_t> CandidateFeatures() {
    const std::size_t d = data_.num_features();
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), 0);
    if (cfg_.max_features == 0 || cfg_.max_features >= d) return features;
    // Partial Fisher-Yates, then ascending order for tie-breaking.
    for (std::size_t i = 0; i < cfg_.max_features; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.uniform_int(d - i));
      std::swap(features[i], features[j]);
    }
    features.resize(cfg_.max_features);
    std::sort(features.begin(), features.end());
    return features;
  }

  Split FindSplit(const std::vector<std::size_t>& rows,
                  const std::vector<std::size_t>& total_counts) {
    Split best;
    const std::size_t n = rows.size();
    const std::size_t min_leaf = std::max<std::size_t>(cfg_.min_leaf, 1);
    std::vector<std::size_t> sorted = rows;
    std::vector<std::size_t> left(classes_);
    std::vector<std::size_t> right(classes_);

    for (std::size_t f : CandidateFeatures()) {
      std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        return data_.features(a, f) < data_.features(b, f);
      });
      std::fill(left.begin(), left.end(), 0);
      right = total_counts;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto y = static_cast<std::size_t>(data_.labels[sorted[i]]);
        ++left[y];
        --right[y];
        const double lo = data_.features(sorted[i], f);
        const double hi = data_.features(sorted[i + 1], f);
        if (!(lo < hi)) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        const double score = (static_cast<double>(n_left) * gini(left) +
                              static_cast<double>(n_right) * gini(right)) /
                             static_cast<double>(n);
        // Features and thresholds are visited in ascending order, so a strict
        // improvement keeps the lowest (feature, threshold) among ties.
        if (!best.found || score < best.score - kImpurityTol) {
          best = Split{true, f, lo + 0.5 * (hi - lo), score};
        }
      }
    }
    return best;
  }

  void Place(DecisionTree& tree, int id, std::size_t slot) {
    const BuildNode& node = nodes_[static_cast<std::size_t>(id)];
    if (node.leaf) {
      tree.nodes[slot] = TreeNode{NodeKind::kLeaf, -1, 0.0, node.label};
      FillReplicas(tree, slot, node.label);
      return;
    }
    tree.nodes[slot] = TreeNode{NodeKind::kInternal, node.feature, node.threshold, node.label};
    Place(tree, node.left, DecisionTree::left(slot));
    Place(tree, node.right, DecisionTree::right(slot));
  }

  void FillReplicas(DecisionTree& tree, std::size_t slot, int label) {
    for (std::size_t child : {DecisionTree::left(slot), DecisionTree::right(slot)}) {
      if (child >= tree.nodes.size()) return;
      tree.nodes[child] = TreeNode{NodeKind::kReplica, -1, 0.0, label};
      FillReplicas(tree, child, label);
    }
  }

  const Dataset& data_;
  const TreeConfig& cfg_;
  Rng rng_;
  std::size_t classes_;
  std::vector<BuildNode> nodes_;
  int max_depth_ = 0;
};

void ValidateSubtreeReplicas(const DecisionTree& t, std::size_t slot) {
  for (std::size_t child : {DecisionTree::left(slot), DecisionTree::right(slot)}) {
    if (child >= t.nodes.size()) return;
    if (t.nodes[child].kind != NodeKind::kReplica) {
      throw InputError("tree: slot " + std::to_string(child) +
                       " below a leaf must be a replica");
    }
    ValidateSubtreeReplicas(t, child);
  }
}

void ValidateFrom(const DecisionTree& t, std::size_t slot) {
  const TreeNode& node = t.nodes[slot];
  if (node.kind == NodeKind::kReplica) {
    throw InputError("tree: reachable slot " + std::to_string(slot) + " is a replica");
  }
  if (node.label < 0 || node.label >= t.num_classes) {
    throw InputError("tree: slot " + std::to_string(slot) + " has an invalid label");
  }
  if (node.kind == NodeKind::kLeaf) {
    ValidateSubtreeReplicas(t, slot);
    return;
  }
  if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= t.num_features) {
    throw InputError("tree: slot " + std::to_string(slot) + " splits on an unknown feature");
  }
  if (DecisionTree::right(slot) >= t.nodes.size()) {
    throw InputError("tree: internal slot " + std::to_string(slot) + " has no children");
  }
  ValidateFrom(t, DecisionTree::left(slot));
  ValidateFrom(t, DecisionTree::right(slot));
}

}  // namespace

double gini(std::span<const std::size_t> class_counts) {
  std::size_t total = 0;
  for (std::size_t c : class_counts) total += c;
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (std::size_t c : class_counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

void DecisionTree::validate() const {
  if (depth < 0) throw InputError("tree: negative depth");
  if (nodes.size() != capacity(depth)) {
    throw InputError("tree: expected " + std::to_string(capacity(depth)) + " slots, found " +
                     std::to_string(nodes.size()));
  }
  if (num_classes < 1) throw InputError("tree: num_classes must be positive");
  ValidateFrom(*this, 0);
}

DecisionTree train_tree(const Dataset& data, const TreeConfig& cfg) {
  if (data.size() == 0) throw InputError("train_tree: empty dataset");
  data.validate();
  if (cfg.max_depth < 0) throw InputError("train_tree: max_depth must be >= 0");
  if (cfg.max_depth > 20) throw InputError("train_tree: max_depth above 20 is not supported");
  TreeBuilder builder(data, cfg);
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  builder.Build(rows, 0);
  return builder.Materialize();
}

TreePrediction predict_tree(const DecisionTree& tree, std::span<const double> x) {
  if (x.size() < tree.num_features) {
    throw ShapeError("predict_tree: input has " + std::to_string(x.size()) +
                     " features, tree uses " + std::to_string(tree.num_features));
  }
  TreePrediction out;
  std::size_t i = 0;
  out.path.push_back(0);
  while (tree.nodes[i].kind == NodeKind::kInternal) {
    const TreeNode& node = tree.nodes[i];
    i = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? DecisionTree::left(i)
                                                                    : DecisionTree::right(i);
    out.path.push_back(i);
  }
  out.label = tree.nodes[i].label;
  return out;
}

Vector predict_tree_scores(const DecisionTree& tree, std::span<const double> x) {
  Vector v(static_cast<std::size_t>(tree.num_classes), 0.0);
  v[static_cast<std::size_t>(predict_tree(tree, x).label)] = 1.0;
  return v;
}

std::vector<std::size_t> reachable_leaves(const DecisionTree& tree) {
  std::vector<std::size_t> leaves;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].kind == NodeKind::kLeaf) leaves.push_back(i);
  }
  return leaves;
}

std::vector<std::size_t> path_to(std::size_t node) {
  std::vector<std::size_t> path{node};
  while (node != 0) {
    node = DecisionTree::parent(node);
    path.push_back(node);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

void RandomForest::validate() const {
  if (trees.empty()) throw InputError("forest: no trees");
  for (const auto& t : trees) {
    t.validate();
    if (t.num_classes != num_classes || t.num_features != trees.front().num_features) {
      throw InputError("forest: trees disagree on feature or class space");
    }
  }
}

RandomForest train_forest(const Dataset& data, const ForestConfig& cfg) {
  if (data.size() == 0) throw InputError("train_forest: empty dataset");
  data.validate();
  if (cfg.num_trees < 1) throw InputError("train_forest: num_trees must be >= 1");

  const std::size_t d = data.num_features();
  const std::size_t max_features =
      cfg.max_features == 0
          ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))))
          : cfg.max_features;

  RandomForest forest;
  forest.num_classes = data.num_classes;
  const Rng root(cfg.seed);
  for (int w = 0; w < cfg.num_trees; ++w) {
    Rng tree_rng = root.fork(static_cast<std::uint64_t>(w));
    std::vector<std::size_t> rows(data.size());
    if (cfg.bootstrap) {
      for (auto& r : rows) r = static_cast<std::size_t>(tree_rng.uniform_int(data.size()));
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    Dataset sample = data.subset(rows);
    sample.num_classes = data.num_classes;
    TreeConfig tc{cfg.max_depth, cfg.min_leaf, max_features, tree_rng.next_u64()};
    forest.trees.push_back(train_tree(sample, tc));
  }
  return forest;
}

Vector predict_forest(const RandomForest& forest, std::span<const double> x) {
  if (forest.trees.empty()) throw InputError("predict_forest: empty forest");
  Vector v(static_cast<std::size_t>(forest.num_classes), 0.0);
  for (const auto& t : forest.trees) v[static_cast<std::size_t>(predict_tree(t, x).label)] += 1.0;
  for (double& s : v) s /= static_cast<double>(forest.trees.size());
  return v;
}

}  // namespace vfl
