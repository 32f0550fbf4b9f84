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


#include "vfl/attacks/surrogate.h"

#include <algorithm>

#include "vfl/errors.h"

namespace vfl {
namespace {

Matrix ForestScores(const RandomForest& forest, const Matrix& x) {
  Matrix out(x.rows(), static_cast<std::size_t>(forest.num_classes));
  for (std::size_t r = 0; r < x.rows(); ++r) out.set_row(r, predict_forest(forest, x.row(r)));
  return out;
}

}  // namespace

std::size_t default_dummy_count(std::size_t n) { return std::max<std::size_t>(10 * n, 10000); }

Matrix dummy_samples(std::size_t n, std::size_t d, Rng& rng) {
  Matrix out(n, d);
  for (double& x : out.data()) x = rng.uniform();
  return out;
}

double top_class_agreement(const Matrix& predicted, const Matrix& reference) {
  if (predicted.rows() != reference.rows() || predicted.cols() != reference.cols()) {
    throw ShapeError("top_class_agreement: shape mismatch");
  }
  if (predicted.rows() == 0) throw InputError("top_class_agreement: no samples");
  std::size_t hits = 0;
  for (std::size_t r = 0; r < predicted.rows(); ++r) {
    const auto p = predicted.row(r);
    const auto q = reference.row(r);
    const auto pick = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    const double best = *std::max_element(q.begin(), q.end());
    if (q[pick] == best) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.rows());
}

SurrogateResult distill_rf(const RandomForest& forest, std::size_t d,
                           const SurrogateConfig& cfg, Rng& rng) {
  forest.validate();
  if (cfg.num_dummy == 0) throw InputError("distill_rf: num_dummy must be at least 1");
  if (d != forest.num_features()) throw ShapeError("distill_rf: feature count mismatch");

  Rng sample_rng = rng.fork("dummy");
  const Matrix dummy = dummy_samples(cfg.num_dummy, d, sample_rng);
  const Matrix scores = ForestScores(forest, dummy);

  MlpTrainConfig train = cfg.train;
  train.hidden = cfg.hidden;
  train.head = Head::kSoftmax;
  train.seed = rng.fork("train").seed();

  SurrogateResult result{train_mlp(dummy, scores, train), 0.0};
  if (cfg.num_holdout > 0) {
    Rng holdout_rng = rng.fork("holdout");
    const Matrix holdout = dummy_samples(cfg.num_holdout, d, holdout_rng);
    result.agreement =
        top_class_agreement(mlp_forward(result.surrogate, holdout), ForestScores(forest, holdout));
  }
  return result;
}

}  // namespace vfl
