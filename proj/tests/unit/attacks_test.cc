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


#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.h"
#include "vfl/attacks/baselines.h"
#include "vfl/attacks/esa.h"
#include "vfl/attacks/grn.h"
#include "vfl/attacks/pra.h"
#include "vfl/attacks/surrogate.h"
#include "vfl/errors.h"
#include "vfl/linalg/activations.h"
#include "vfl/models/model.h"

namespace vfl {
namespace {

using testing::RandomMatrix;
using testing::RandomVector;

// ---------------------------------------------------------------- ESA

TEST(EsaTest, ThreeClassWorkedExample) {
  const LogRegModel m = testing::ThreeClassExampleModel();
  const auto part = VerticalPartition::FromAdversaryIndices(4, {0, 1});
  const Vector x_adv{25, 2000};
  const Vector v{0.867, 0.084, 0.049};
  const EsaProblem prob = esa_problem(m, part, x_adv, v);
  ASSERT_EQ(prob.log_ratios.size(), 2u);
  EXPECT_NEAR(prob.log_ratios[0], 2.334, 1e-3);
  EXPECT_NEAR(prob.log_ratios[1], 0.539, 1e-3);
  const Vector x = esa(m, part, x_adv, v);
  ASSERT_EQ(x.size(), 2u);
  EXPECT_NEAR(x[0], 8011.8, 0.01 * 8011.8);
  EXPECT_NEAR(x[1], 3.046, 0.01 * 3.046);
}

TEST(EsaTest, BinarySingleUnknownIsExact) {
  Rng rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    LogRegModel m;
    m.num_classes = 2;
    m.weights = RandomMatrix(1, 3, rng);
    m.bias = {rng.uniform(-1, 1)};
    const auto part = VerticalPartition::FromTargetIndices(3, {1});
    const Vector x = RandomVector(3, rng);
    const Vector v = predict_logreg(m, x);
    const auto [x_adv, x_target] = part.split(x);
    const Vector got = esa(m, part, x_adv, v);
    ASSERT_EQ(got.size(), 1u);
    EXPECT_NEAR(got[0], x_target[0], 1e-9);
  }
}

TEST(EsaTest, UnderdeterminedMatchesRidgeLimit) {
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    LogRegModel m;
    m.num_classes = 3;
    m.weights = RandomMatrix(3, 8, rng);
    const auto part = VerticalPartition::FromTargetIndices(8, {0, 2, 3, 5, 7});
    const Vector x = RandomVector(8, rng, 0.0, 1.0);
    const Vector v = predict_logreg(m, x);
    const auto [x_adv, x_target] = part.split(x);
    const EsaProblem prob = esa_problem(m, part, x_adv, v);
    const Vector ridge = testing::RidgeSolve(prob.theta_target_diff, prob.rhs, 1e-10);
    const Vector got = esa(m, part, x_adv, v);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], ridge[i], 1e-6);
    // The true x solves the system, so the minimum-norm solution is no longer.
    EXPECT_LE(norm2(got), norm2(x_target) + 1e-9);
  }
}

TEST(EsaTest, ExactRecoveryWhenSystemIsDetermined) {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const int c = 3 + static_cast<int>(rng.uniform_int(8));
    const std::size_t d = 12;
    LogRegModel m;
    m.num_classes = c;
    m.weights = RandomMatrix(static_cast<std::size_t>(c), d, rng);
    m.bias = RandomVector(static_cast<std::size_t>(c), rng);
    const std::size_t d_target = 1 + rng.uniform_int(static_cast<std::uint64_t>(c - 1));
    auto order = rng.permutation(d);
    order.resize(d_target);
    const auto part = VerticalPartition::FromTargetIndices(d, order);
    EsaSolver solver(m, part);
    for (int s = 0; s < 5; ++s) {
      const Vector x = RandomVector(d, rng, 0.0, 1.0);
      const auto [x_adv, x_target] = part.split(x);
      const Vector got = solver.infer(x_adv, predict_logreg(m, x));
      for (std::size_t i = 0; i < d_target; ++i) EXPECT_NEAR(got[i], x_target[i], 1e-6);
    }
  }
}

TEST(EsaTest, RowsMatchSingleSampleSolve) {
  Rng rng(4);
  LogRegModel m;
  m.num_classes = 4;
  m.weights = RandomMatrix(4, 6, rng);
  const auto part = VerticalPartition::FromTargetIndices(6, {1, 4});
  const Matrix x = RandomMatrix(5, 6, rng);
  const auto [x_adv, x_target] = part.split_rows(x);
  const Matrix v = predict_logreg_rows(m, x);
  EsaSolver solver(m, part);
  const Matrix rows = solver.infer_rows(x_adv, v);
  for (std::size_t r = 0; r < 5; ++r) {
    const Vector one = solver.infer(x_adv.row(r), v.row(r));
    for (std::size_t j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(rows(r, j), one[j]);
  }
}

TEST(EsaTest, RejectsDegenerateProblems) {
  const LogRegModel m = testing::ThreeClassExampleModel();
  EXPECT_THROW(EsaSolver(m, VerticalPartition::FromTargetIndices(4, {})), InputError);
  LogRegModel zero = m;
  for (std::size_t r = 0; r < 3; ++r) zero.weights(r, 2) = zero.weights(r, 3) = 0.0;
  EXPECT_THROW(EsaSolver(zero, VerticalPartition::FromTargetIndices(4, {2, 3})),
               NumericError);
  const auto part = VerticalPartition::FromTargetIndices(4, {2, 3});
  EXPECT_THROW(esa(m, part, Vector{1.0}, Vector{0.3, 0.3, 0.4}), ShapeError);
}

TEST(EsaTest, ZeroConfidenceIsClampedNotInfinite) {
  const LogRegModel m = testing::ThreeClassExampleModel();
  const auto part = VerticalPartition::FromAdversaryIndices(4, {0, 1});
  const Vector x = esa(m, part, Vector{25, 2000}, Vector{1.0, 0.0, 0.0});
  for (double value : x) EXPECT_TRUE(std::isfinite(value));
}

// ---------------------------------------------------------------- PRA

std::vector<std::uint8_t> Indicator(std::initializer_list<int> bits) {
  return {bits.begin(), bits.end()};
}

TEST(PraTest, BranchingExampleIndicators) {
  const DecisionTree tree = testing::BranchingExampleTree();
  const auto part = VerticalPartition::FromAdversaryIndices(4, {0, 1});
  PraResult r = pra_candidates(tree, part, Vector{25, 2000}, 1);
  EXPECT_EQ(r.beta, Indicator({1, 1, 0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(r.alpha, Indicator({0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0}));
  ASSERT_EQ(r.candidate_paths.size(), 1u);
  EXPECT_EQ(r.candidate_paths[0], (std::vector<std::size_t>{0, 1, 4}));

  Rng rng(1);
  const auto& constraints = pra_infer(r, tree, part, rng);
  ASSERT_EQ(constraints.size(), 1u);
  EXPECT_EQ(constraints[0], (BranchConstraint{2, 5000.0, false}));
  EXPECT_EQ(r.chosen_path, r.candidate_paths[0]);
}

TEST(PraTest, FullyKnownSampleHasOnlyTheTruePath) {
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const DecisionTree tree = testing::RandomTree(4, 5, 3, rng, 0.2);
    const auto part = VerticalPartition::FromTargetIndices(5, {});
    const Vector x = RandomVector(5, rng);
    const TreePrediction truth = predict_tree(tree, x);
    PraResult r = pra_candidates(tree, part, x, truth.label);
    ASSERT_EQ(r.candidate_paths.size(), 1u);
    EXPECT_EQ(r.candidate_paths[0], truth.path);
    EXPECT_TRUE(pra_infer(r, tree, part, rng).empty());
  }
}

TEST(PraTest, CandidatesMatchBruteForceAndContainTruth) {
  Rng rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const int depth = 1 + static_cast<int>(rng.uniform_int(5));
    const std::size_t d = 2 + rng.uniform_int(6);
    const DecisionTree tree = testing::RandomTree(depth, d, 3, rng, 0.25);
    const auto part = sample_partition(d, 0.5, rng);
    const Vector x = RandomVector(d, rng);
    const TreePrediction truth = predict_tree(tree, x);
    const auto [x_adv, x_target] = part.split(x);
    const PraResult r = pra_candidates(tree, part, x_adv, truth.label);
    auto oracle = testing::BruteForceCandidates(tree, part, x, truth.label);
    std::sort(oracle.begin(), oracle.end(),
              [](const auto& a, const auto& b) { return a.back() < b.back(); });
    EXPECT_EQ(r.candidate_paths, oracle);
    EXPECT_NE(std::find(r.candidate_paths.begin(), r.candidate_paths.end(), truth.path),
              r.candidate_paths.end());
  }
}

TEST(PraTest, UniformChoiceBetweenTwoCandidates) {
  DecisionTree tree;
  tree.depth = 1;
  tree.num_classes = 2;
  tree.num_features = 2;
  tree.nodes = {{NodeKind::kInternal, 1, 0.5, 0},
                {NodeKind::kLeaf, -1, 0.0, 1},
                {NodeKind::kLeaf, -1, 0.0, 1}};
  const auto part = VerticalPartition::FromTargetIndices(2, {1});
  Rng rng(4);
  int left = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    PraResult r = pra_candidates(tree, part, Vector{0.2}, 1);
    ASSERT_EQ(r.candidate_paths.size(), 2u);
    pra_infer(r, tree, part, rng);
    left += r.chosen_path.back() == 1;
  }
  EXPECT_NEAR(static_cast<double>(left) / draws, 0.5, 0.02);
}

TEST(PraTest, EmptyCandidateSetIsInfeasible) {
  const DecisionTree tree = testing::BranchingExampleTree();
  const auto part = VerticalPartition::FromAdversaryIndices(4, {0, 1});
  PraResult r = pra_candidates(tree, part, Vector{25, 2000}, 5);
  EXPECT_TRUE(r.candidate_paths.empty());
  Rng rng(5);
  EXPECT_THROW(pra_infer(r, tree, part, rng), AttackInfeasibleError);
}

TEST(PraTest, EstimateTakesIntervalMidpoints) {
  const auto part = VerticalPartition::FromTargetIndices(4, {1, 3});
  const std::vector<BranchConstraint> constraints = {
      {1, 0.8, true}, {1, 0.2, false}, {1, 0.6, true}};
  const Vector x = pra_estimate(constraints, part);
  ASSERT_EQ(x.size(), 2u);
  EXPECT_DOUBLE_EQ(x[0], 0.4);  // (0.2, 0.6]
  EXPECT_DOUBLE_EQ(x[1], 0.5);  // unconstrained
}

// ------------------------------------------------------------ baselines

TEST(BaselineTest, UniformMoments) {
  Rng rng(6);
  const Matrix draws = baseline_uniform_rows(100000, 1, rng);
  double mean = 0.0;
  for (double v : draws.data()) mean += v;
  mean /= 1e5;
  double var = 0.0;
  for (double v : draws.data()) var += (v - mean) * (v - mean);
  var /= 1e5;
  EXPECT_NEAR(mean, 0.5, 0.01);
  EXPECT_NEAR(var, 1.0 / 12.0, 0.01);
}

TEST(BaselineTest, GaussianMassAndClamping) {
  Rng rng(7);
  int inside = 0;
  for (int i = 0; i < 100000; ++i) {
    const double v = rng.normal(kGaussianBaselineMean, kGaussianBaselineStddev);
    inside += v > 0.0 && v < 1.0;
  }
  EXPECT_GE(inside, 95000);
  const Matrix guesses = baseline_gaussian_rows(10000, 3, rng);
  for (double v : guesses.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(BaselineTest, DeterministicAndValidated) {
  Rng a(8);
  Rng b(8);
  EXPECT_EQ(baseline_gaussian(5, a), baseline_gaussian(5, b));
  EXPECT_EQ(baseline_uniform(5, a), baseline_uniform(5, b));
  EXPECT_THROW(baseline_uniform(0, a), InputError);
}

// ------------------------------------------------------------------ GRN

LogRegModel RandomLogReg(int classes, std::size_t d, Rng& rng) {
  LogRegModel m;
  m.num_classes = classes;
  m.weights = RandomMatrix(static_cast<std::size_t>(classes), d, rng, -2.0, 2.0);
  return m;
}

GrnConfig TinyGrn() {
  GrnConfig cfg;
  cfg.hidden = {8, 6};
  cfg.batch_size = 16;
  cfg.learning_rate = 1e-2;
  cfg.seed = 3;
  return cfg;
}

class GrnGradientTest : public ::testing::TestWithParam<bool> {};

TEST_P(GrnGradientTest, CompositeGradientMatchesFiniteDifference) {
  const bool mlp_model = GetParam();
  Rng rng(9);
  const auto part = VerticalPartition::FromTargetIndices(4, {1, 3});
  TrainedModel model = RandomLogReg(3, 4, rng);
  if (mlp_model) model = make_mlp({4, {5}, 3, Head::kSoftmax, true}, rng);
  GrnConfig cfg = TinyGrn();
  // Unsquashed output with a zero threshold keeps the variance hinge active.
  cfg.squash = false;
  cfg.variance_threshold = 0.0;
  MlpModel gen = make_generator(cfg, part, rng);
  for (auto& layer : gen.layers) {
    for (double& w : layer.weight.data()) w = rng.normal(0.0, 0.5);
  }
  const Matrix x_adv = RandomMatrix(6, 2, rng, 0.0, 1.0);
  const Matrix noise = RandomMatrix(6, 2, rng);
  const Matrix observed = predict_rows(model, RandomMatrix(6, 4, rng, 0.0, 1.0));

  const auto objective = [&] {
    return grn_loss_and_gradient(gen, model, part, cfg, x_adv, noise, observed).loss;
  };
  const GrnLoss g = grn_loss_and_gradient(gen, model, part, cfg, x_adv, noise, observed);
  EXPECT_GT(g.penalty, 0.0);
  for (std::size_t l = 0; l < gen.layers.size(); ++l) {
    const Vector fd_w = testing::FiniteDifference(gen.layers[l].weight.data(), objective);
    EXPECT_LT(testing::MaxRelativeError(g.gradients.layers[l].weight.data(), fd_w, 1e-5), 1e-4)
        << "layer " << l;
    const Vector fd_b = testing::FiniteDifference(gen.layers[l].bias, objective);
    EXPECT_LT(testing::MaxRelativeError(g.gradients.layers[l].bias, fd_b, 1e-5), 1e-4)
        << "layer " << l;
  }
}

INSTANTIATE_TEST_SUITE_P(VerticalModels, GrnGradientTest, ::testing::Bool());

TEST(GrnTest, InputWidthFollowsAblationSwitches) {
  const auto part = VerticalPartition::FromTargetIndices(5, {0, 4});
  GrnConfig cfg;
  EXPECT_EQ(grn_input_width(cfg, part), 5u);
  cfg.use_adv_input = false;
  EXPECT_EQ(grn_input_width(cfg, part), 2u);
  cfg.use_adv_input = true;
  cfg.use_noise = false;
  EXPECT_EQ(grn_input_width(cfg, part), 3u);
}

TEST(GrnTest, IrrelevantTargetFeaturesGiveZeroLoss) {
  Rng rng(10);
  LogRegModel m = RandomLogReg(3, 4, rng);
  const auto part = VerticalPartition::FromTargetIndices(4, {0, 2});
  for (std::size_t r = 0; r < 3; ++r) m.weights(r, 0) = m.weights(r, 2) = 0.0;
  const Matrix x = RandomMatrix(64, 4, rng, 0.0, 1.0);
  const auto [x_adv, x_target] = part.split_rows(x);
  GrnConfig cfg = TinyGrn();
  cfg.epochs = 3;
  const GrnResult res = grn_train(m, part, x_adv, predict_logreg_rows(m, x), cfg);
  ASSERT_EQ(res.loss_trace.size(), 3u);
  EXPECT_LT(res.loss_trace.back(), 1e-6);
}

TEST(GrnTest, TrainingReducesLossAndIsDeterministic) {
  Rng rng(11);
  const LogRegModel m = RandomLogReg(3, 2, rng);
  const auto part = VerticalPartition::FromTargetIndices(2, {1});
  const Matrix x = RandomMatrix(256, 2, rng, 0.0, 1.0);
  const auto [x_adv, x_target] = part.split_rows(x);
  const Matrix v = predict_logreg_rows(m, x);
  GrnConfig cfg = TinyGrn();
  cfg.epochs = 50;
  const GrnResult a = grn_train(m, part, x_adv, v, cfg);
  EXPECT_LT(a.loss_trace.back(), a.loss_trace.front());
  const GrnResult b = grn_train(m, part, x_adv, v, cfg);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  EXPECT_EQ(a.generator.layers.back().weight, b.generator.layers.back().weight);
}

TEST(GrnTest, RejectsTreesAndMismatchedInputs) {
  const TrainedModel tree = testing::BranchingExampleTree();
  const auto part = VerticalPartition::FromAdversaryIndices(4, {0, 1});
  const Matrix x_adv(4, 2, 0.5);
  const Matrix v(4, 2, 0.5);
  EXPECT_THROW(grn_train(tree, part, x_adv, v, TinyGrn()), ModelKindError);
  const TrainedModel lr = testing::ThreeClassExampleModel();
  EXPECT_THROW(grn_train(lr, part, x_adv, Matrix(3, 3, 0.3), TinyGrn()), ShapeError);
}

TEST(GrnTest, InferenceShapeRangeAndDeterminism) {
  Rng rng(12);
  const auto part = VerticalPartition::FromTargetIndices(6, {0, 3, 5});
  const GrnConfig cfg = TinyGrn();
  MlpModel gen = make_generator(cfg, part, rng);
  for (auto& layer : gen.layers) {
    for (double& w : layer.weight.data()) w = rng.normal(0.0, 3.0);
  }
  const Matrix x_adv = RandomMatrix(1000, 3, rng, 0.0, 1.0);
  Rng a(1);
  Rng b(1);
  const Matrix first = grn_infer_rows(gen, cfg, part, x_adv, a);
  EXPECT_EQ(first, grn_infer_rows(gen, cfg, part, x_adv, b));
  EXPECT_EQ(first.cols(), 3u);
  for (double v : first.data()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  Rng c(1);
  const Vector single = grn_infer(gen, cfg, part, x_adv.row(0), c);
  EXPECT_EQ(single.size(), 3u);
  EXPECT_THROW(grn_infer(gen, cfg, part, Vector{0.1}, c), ShapeError);
}

TEST(NaiveRegressionTest, RecoversTargetsOfAWellConditionedModel) {
  Rng rng(13);
  const LogRegModel m = RandomLogReg(4, 4, rng);
  const auto part = VerticalPartition::FromTargetIndices(4, {1, 2});
  const Matrix x = RandomMatrix(20, 4, rng, 0.0, 1.0);
  const auto [x_adv, x_target] = part.split_rows(x);
  NaiveRegressionConfig cfg;
  cfg.iterations = 3000;
  cfg.learning_rate = 1.0;
  const Matrix est = naive_regression_attack(m, part, x_adv, predict_logreg_rows(m, x), cfg);
  ASSERT_EQ(est.rows(), 20u);
  ASSERT_EQ(est.cols(), 2u);
  EXPECT_LT(max_abs_diff(est, x_target), 0.05);
}

// ------------------------------------------------------------ surrogate

RandomForest ConstantForest(int classes, std::size_t d, std::initializer_list<int> labels) {
  RandomForest f;
  f.num_classes = classes;
  for (int label : labels) {
    DecisionTree t;
    t.depth = 0;
    t.num_classes = classes;
    t.num_features = d;
    t.nodes = {{NodeKind::kLeaf, -1, 0.0, label}};
    f.trees.push_back(t);
  }
  return f;
}

SurrogateConfig SmallSurrogate(std::size_t dummies) {
  SurrogateConfig cfg;
  cfg.num_dummy = dummies;
  cfg.num_holdout = 1000;
  cfg.hidden = {64, 32};
  cfg.train.optimizer = OptimizerKind::kAdam;
  cfg.train.learning_rate = 3e-3;
  cfg.train.epochs = 30;
  return cfg;
}

TEST(SurrogateTest, DummySamplesShapeAndRange) {
  Rng rng(14);
  const Matrix d = dummy_samples(500, 7, rng);
  EXPECT_EQ(d.rows(), 500u);
  EXPECT_EQ(d.cols(), 7u);
  for (double v : d.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_EQ(default_dummy_count(10), 10000u);
  EXPECT_EQ(default_dummy_count(5000), 50000u);
}

TEST(SurrogateTest, ConstantForestIsReproduced) {
  const RandomForest f = ConstantForest(3, 4, {0, 0, 2, 1});  // (0.5, 0.25, 0.25)
  Rng rng(15);
  const SurrogateResult res = distill_rf(f, 4, SmallSurrogate(2000), rng);
  const Matrix probe = dummy_samples(200, 4, rng);
  const Matrix out = mlp_forward(res.surrogate, probe);
  const Vector want{0.5, 0.25, 0.25};
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(out(r, k), want[k], 0.02);
  }
  EXPECT_DOUBLE_EQ(res.agreement, 1.0);
}

TEST(SurrogateTest, AgreementCountsTies) {
  const Matrix forest = Matrix::FromRows({{0.5, 0.5, 0.0}, {0.2, 0.7, 0.1}, {0.4, 0.3, 0.3}});
  const Matrix surrogate = Matrix::FromRows({{0.1, 0.8, 0.1}, {0.6, 0.3, 0.1}, {0.5, 0.2, 0.3}});
  EXPECT_DOUBLE_EQ(top_class_agreement(surrogate, forest), 2.0 / 3.0);
}

TEST(SurrogateTest, MoreDummiesDoNotHurtFidelity) {
  const Dataset ds = synth_generate({2000, 6, 3, 1.0, 0.3, 16});
  double small_total = 0.0;
  double large_total = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ForestConfig fc;
    fc.num_trees = 10;
    fc.seed = seed;
    const RandomForest f = train_forest(ds, fc);
    Rng a(seed);
    Rng b(seed);
    small_total += distill_rf(f, 6, SmallSurrogate(200), a).agreement;
    large_total += distill_rf(f, 6, SmallSurrogate(4000), b).agreement;
  }
  EXPECT_GE(large_total, small_total);
}

}  // namespace
}  // namespace vfl
