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


#include "vfl/harness/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "vfl/attacks/baselines.h"
#include "vfl/attacks/esa.h"
#include "vfl/attacks/grn.h"
#include "vfl/attacks/pra.h"
#include "vfl/attacks/surrogate.h"
#include "vfl/errors.h"
#include "vfl/metrics/metrics.h"
#include "vfl/partition/partition.h"

namespace vfl {
namespace {

// Index path component that keeps the frozen-model seed apart from every
// (fraction, trial) cell.
constexpr std::uint64_t kFrozenModelPath = ~std::uint64_t{0};

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(Clock::now()) {}
  double elapsed_ms() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
  }

 private:
  bool enabled_;
  Clock::time_point start_;
};

// What an attack produced for the prediction set.
struct AttackOutput {
  Matrix inferred;
  std::optional<double> cbr;
  std::size_t infeasible = 0;
};

std::span<const DecisionTree> TreesOf(const TrainedModel& model) {
  if (const auto* t = std::get_if<DecisionTree>(&model)) return {t, 1};
  if (const auto* f = std::get_if<RandomForest>(&model)) return f->trees;
  return {};
}

int ArgMax(std::span<const double> v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Differentiable stand-in for the vertical model: the model itself, or a
// distilled surrogate for tree families.
TrainedModel DifferentiableTarget(const ExperimentConfig& cfg, const TrainedModel& model,
                                  std::size_t n_pred, Rng& rng) {
  if (is_differentiable(model)) return model;
  RandomForest forest;
  if (const auto* t = std::get_if<DecisionTree>(&model)) {
    forest.num_classes = t->num_classes;
    forest.trees.push_back(*t);
  } else {
    forest = std::get<RandomForest>(model);
  }
  SurrogateConfig sc = cfg.attack.surrogate;
  if (sc.num_dummy == 0) sc.num_dummy = default_dummy_count(n_pred);
  return distill_rf(forest, forest.num_features(), sc, rng).surrogate;
}

AttackOutput RunAttack(const ExperimentConfig& cfg, const TrainedModel& model,
                       const VerticalPartition& part, const Matrix& x_adv,
                       const Matrix& x_target, const Matrix& observed, Rng& rng) {
  const auto trees = TreesOf(model);
  AttackOutput out;
  switch (cfg.attack.kind) {
    case AttackKind::kEsa: {
      const EsaSolver solver(std::get<LogRegModel>(model), part, cfg.attack.pinv_cutoff);
      out.inferred = solver.infer_rows(x_adv, observed);
      break;
    }
    case AttackKind::kPra: {
      const auto& tree = std::get<DecisionTree>(model);
      out.inferred = Matrix(x_adv.rows(), part.num_target());
      CbrCounts counts;
      Rng pick = rng.fork("pra");
      for (std::size_t r = 0; r < x_adv.rows(); ++r) {
        PraResult res = pra_candidates(tree, part, x_adv.row(r), ArgMax(observed.row(r)));
        try {
          pra_infer(res, tree, part, pick);
        } catch (const AttackInfeasibleError&) {
          ++out.infeasible;
        }
        out.inferred.set_row(r, pra_estimate(res.constraints, part));
        counts += pra_cbr_counts(res.constraints, part, x_target.row(r));
      }
      out.cbr = counts.rate();
      return out;
    }
    case AttackKind::kGrna: {
      Rng surrogate_rng = rng.fork("surrogate");
      const TrainedModel target = DifferentiableTarget(cfg, model, x_adv.rows(), surrogate_rng);
      GrnConfig gc = cfg.attack.grn;
      gc.seed = rng.fork("grn").seed();
      const GrnResult trained = grn_train(target, part, x_adv, observed, gc);
      Rng infer_rng = rng.fork("grn_infer");
      out.inferred = grn_infer_rows(trained.generator, gc, part, x_adv, infer_rng);
      break;
    }
    case AttackKind::kNaiveRegression: {
      Rng surrogate_rng = rng.fork("surrogate");
      const TrainedModel target = DifferentiableTarget(cfg, model, x_adv.rows(), surrogate_rng);
      NaiveRegressionConfig nc = cfg.attack.naive;
      nc.seed = rng.fork("naive").seed();
      out.inferred = naive_regression_attack(target, part, x_adv, observed, nc);
      break;
    }
    case AttackKind::kBaselines:
      break;
  }
  if (!trees.empty() && !out.inferred.empty()) {
    out.cbr = cbr(trees, part, x_adv, out.inferred, x_target);
  }
  return out;
}

}  // namespace

Vector apply_rounding(std::span<const double> v, int digits) {
  if (digits < 1) throw InputError("apply_rounding: digits must be at least 1");
  const double scale = std::pow(10.0, digits);
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double q = std::floor(v[i] * scale);
    // v * scale can land just below an integer that v itself reaches.
    if ((q + 1.0) / scale <= v[i]) q += 1.0;
    out[i] = q / scale;
  }
  return out;
}

Matrix apply_rounding_rows(const Matrix& v, int digits) {
  Matrix out(v.rows(), v.cols());
  for (std::size_t r = 0; r < v.rows(); ++r) out.set_row(r, apply_rounding(v.row(r), digits));
  return out;
}

Dataset load_experiment_data(const DatasetSpec& spec) {
  Dataset data;
  if (spec.csv) {
    CsvSchema schema;
    schema.label_column = spec.label_column;
    schema.delimiter = spec.delimiter;
    data = load_csv(*spec.csv, schema);
  } else {
    data = synth_generate(spec.synth);
  }
  if (spec.normalize) data = minmax_normalize(data).first;
  return data;
}

TrainedModel train_vertical_model(const ModelSpec& spec, const DefenseSpec& defense,
                                  const Dataset& train, std::uint64_t seed) {
  switch (spec.kind) {
    case ModelKind::kLogReg: {
      LogRegConfig c = spec.logreg;
      c.seed = seed;
      return train_logreg(train, c);
    }
    case ModelKind::kMlp: {
      MlpTrainConfig c = spec.mlp;
      c.seed = seed;
      if (defense.dropout > 0.0) c.dropout = defense.dropout;
      return train_mlp(train, c);
    }
    case ModelKind::kTree: {
      TreeConfig c = spec.tree;
      c.seed = seed;
      return train_tree(train, c);
    }
    case ModelKind::kForest: {
      ForestConfig c = spec.forest;
      c.seed = seed;
      return train_forest(train, c);
    }
  }
  throw InputError("unknown model kind");
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t fraction_index, int trial) {
  return Rng::derive_seed(master, {fraction_index, static_cast<std::uint64_t>(trial)});
}

std::string defense_label(const DefenseSpec& defense) {
  std::string out;
  if (defense.rounding_digits) out = "round" + std::to_string(*defense.rounding_digits);
  if (defense.dropout > 0.0) {
    std::ostringstream rate;
    rate << defense.dropout;
    out += (out.empty() ? "" : "+") + std::string("dropout") + rate.str();
  }
  return out.empty() ? "none" : out;
}

std::string attack_label(const AttackSpec& attack) {
  std::string out(attack_kind_name(attack.kind));
  if (attack.kind != AttackKind::kGrna) return out;
  if (!attack.grn.use_adv_input) out += "[noise_only]";
  if (!attack.grn.use_noise) out += "[no_noise]";
  if (attack.grn.variance_weight == 0.0) out += "[no_penalty]";
  return out;
}

std::vector<ReportRecord> run_trial(const ExperimentConfig& cfg, const Dataset& data,
                                    std::size_t fraction_index, int trial,
                                    const TrainedModel* frozen_model) {
  const double frac = cfg.fractions.at(fraction_index);
  const std::uint64_t seed = trial_seed(cfg.seed, fraction_index, trial);
  Rng rng(seed);

  const std::uint64_t split_seed =
      frozen_model != nullptr ? Rng::derive_seed(cfg.seed, {kFrozenModelPath})
                              : rng.fork("split").seed();
  const DatasetSplit split = split_dataset(data, cfg.split, split_seed);
  if (split.train.size() == 0 || split.pred.size() == 0) {
    throw InputError("dataset too small for the configured split");
  }
  TrainedModel local_model;
  if (frozen_model == nullptr) {
    local_model = train_vertical_model(cfg.model, cfg.defense, split.train,
                                       rng.fork("model").seed());
  }
  const TrainedModel& model = frozen_model != nullptr ? *frozen_model : local_model;

  Rng part_rng = rng.fork("partition");
  const VerticalPartition part = sample_partition(data.num_features(), frac, part_rng);

  const Matrix& x_pred = split.pred.features;
  Matrix observed = predict_rows(model, x_pred);
  if (cfg.defense.rounding_digits) {
    observed = apply_rounding_rows(observed, *cfg.defense.rounding_digits);
  }
  const auto [x_adv, x_target] = part.split_rows(x_pred);

  std::optional<double> bound;
  try {
    bound = mse_upper_bound(x_target);
  } catch (const InputError&) {
    bound.reset();  // raw-scale features: the bound needs values in [0, 1]
  }

  ReportRecord base;
  base.dataset = cfg.dataset.name;
  base.model = std::string(model_kind_name(cfg.model.kind));
  base.defense = defense_label(cfg.defense);
  base.d_target_frac = frac;
  base.d_target = part.num_target();
  base.trial = trial;
  base.seed = seed;
  base.n_pred = x_pred.rows();
  base.upper_bound = bound;

  const auto trees = TreesOf(model);
  auto baseline_record = [&](const std::string& name, const Matrix& guess, double ms) {
    ReportRecord r = base;
    r.attack = name;
    r.mse = mse_per_feature(guess, x_target).mse;
    if (!trees.empty()) r.cbr = cbr(trees, part, x_adv, guess, x_target);
    r.runtime_ms = ms;
    return r;
  };

  std::vector<ReportRecord> records;
  if (cfg.attack.kind != AttackKind::kBaselines) {
    Rng attack_rng = rng.fork("attack");
    const Stopwatch watch(cfg.timing);
    const AttackOutput out = RunAttack(cfg, model, part, x_adv, x_target, observed, attack_rng);
    ReportRecord r = base;
    r.attack = attack_label(cfg.attack);
    r.mse = mse_per_feature(out.inferred, x_target).mse;
    r.cbr = out.cbr;
    r.infeasible = out.infeasible;
    r.runtime_ms = watch.elapsed_ms();
    if (!std::isfinite(r.mse)) throw NumericError("attack produced a non-finite MSE");
    records.push_back(std::move(r));
  }
  {
    Rng uniform_rng = rng.fork("uniform");
    const Stopwatch watch(cfg.timing);
    const Matrix guess = baseline_uniform_rows(x_pred.rows(), part.num_target(), uniform_rng);
    records.push_back(baseline_record("uniform", guess, watch.elapsed_ms()));
  }
  {
    Rng gaussian_rng = rng.fork("gaussian");
    const Stopwatch watch(cfg.timing);
    const Matrix guess = baseline_gaussian_rows(x_pred.rows(), part.num_target(), gaussian_rng);
    records.push_back(baseline_record("gaussian", guess, watch.elapsed_ms()));
  }
  return records;
}

std::vector<ReportRecord> run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  if (auto problems = validate_config(cfg); !problems.empty()) {
    throw ConfigError(std::move(problems));
  }
  const Dataset data = load_experiment_data(cfg.dataset);

  std::optional<TrainedModel> frozen;
  if (cfg.freeze_model) {
    const DatasetSplit split =
        split_dataset(data, cfg.split, Rng::derive_seed(cfg.seed, {kFrozenModelPath}));
    frozen = train_vertical_model(cfg.model, cfg.defense, split.train,
                                  Rng::derive_seed(cfg.seed, {kFrozenModelPath, 1}));
  }

  struct Cell {
    std::size_t fraction_index;
    int trial;
  };
  std::vector<Cell> cells;
  for (std::size_t f = 0; f < cfg.fractions.size(); ++f) {
    for (int t = 0; t < cfg.trials; ++t) cells.push_back({f, t});
  }
  std::vector<std::vector<ReportRecord>> results(cells.size());

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        results[i] = run_trial(cfg, data, cells[i].fraction_index, cells[i].trial,
                               frozen ? &*frozen : nullptr);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = cells.size();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(options.parallel, 1, cells.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<ReportRecord> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

}  // namespace vfl
