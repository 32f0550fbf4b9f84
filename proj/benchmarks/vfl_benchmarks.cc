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


#include <benchmark/benchmark.h>

#include "vfl/attacks/esa.h"
#include "vfl/attacks/pra.h"
#include "vfl/data/dataset.h"
#include "vfl/linalg/matrix.h"
#include "vfl/linalg/svd.h"
#include "vfl/models/mlp.h"
#include "vfl/models/tree.h"

namespace {

using namespace vfl;

Matrix UniformMatrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
  return m;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Matrix a = UniformMatrix(n, n, rng);
  const Matrix b = UniformMatrix(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(128)->Arg(256);

void BM_Pinv(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const Matrix a = UniformMatrix(n / 2, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pinv(a));
}
BENCHMARK(BM_Pinv)->Arg(10)->Arg(50)->Arg(100);

void BM_EsaInferRows(benchmark::State& state) {
  Rng rng(3);
  LogRegModel m;
  m.num_classes = 11;
  m.weights = UniformMatrix(11, 48, rng);
  std::vector<std::size_t> target(10);
  for (std::size_t i = 0; i < target.size(); ++i) target[i] = 4 * i;
  const auto part = VerticalPartition::FromTargetIndices(48, target);
  const Matrix x = UniformMatrix(static_cast<std::size_t>(state.range(0)), 48, rng);
  const auto [x_adv, x_target] = part.split_rows(x);
  const Matrix v = predict_logreg_rows(m, x);
  const EsaSolver solver(m, part);
  for (auto _ : state) benchmark::DoNotOptimize(solver.infer_rows(x_adv, v));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EsaInferRows)->Arg(1000);

void BM_MlpForwardBackward(benchmark::State& state) {
  Rng rng(4);
  MlpArchitecture arch;
  arch.input = 20;
  arch.hidden = {600, 200, 100};
  arch.output = 6;
  arch.head = Head::kSigmoid;
  arch.layer_norm = true;
  const MlpModel m = make_mlp(arch, rng);
  const Matrix x = UniformMatrix(static_cast<std::size_t>(state.range(0)), 20, rng);
  const Matrix grad(x.rows(), 6, 1e-3);
  for (auto _ : state) {
    MlpCache cache;
    benchmark::DoNotOptimize(mlp_forward(m, x, false, nullptr, &cache));
    benchmark::DoNotOptimize(mlp_backward(m, cache, grad));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForwardBackward)->Arg(64);

void BM_PraCandidates(benchmark::State& state) {
  const Dataset ds = synth_generate({4000, 12, 3, 1.0, 0.5, 5});
  TreeConfig cfg;
  cfg.max_depth = static_cast<int>(state.range(0));
  const DecisionTree tree = train_tree(ds, cfg);
  Rng rng(5);
  const auto part = sample_partition(12, 0.5, rng);
  const auto [x_adv, x_target] = part.split_rows(ds.features);
  std::size_t row = 0;
  for (auto _ : state) {
    const int label = predict_tree(tree, ds.features.row(row)).label;
    benchmark::DoNotOptimize(pra_candidates(tree, part, x_adv.row(row), label));
    row = (row + 1) % ds.size();
  }
}
BENCHMARK(BM_PraCandidates)->Arg(5)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
