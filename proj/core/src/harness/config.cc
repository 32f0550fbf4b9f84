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


#include "vfl/harness/config.h"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "vfl/errors.h"

namespace vfl {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

template <typename E>
using NameTable = std::vector<std::pair<std::string_view, E>>;

const NameTable<ModelKind> kModelKinds = {{"logreg", ModelKind::kLogReg},
                                          {"mlp", ModelKind::kMlp},
                                          {"tree", ModelKind::kTree},
                                          {"forest", ModelKind::kForest}};
const NameTable<AttackKind> kAttackKinds = {{"esa", AttackKind::kEsa},
                                            {"pra", AttackKind::kPra},
                                            {"grna", AttackKind::kGrna},
                                            {"naive_regression", AttackKind::kNaiveRegression},
                                            {"baselines", AttackKind::kBaselines}};
const NameTable<OptimizerKind> kOptimizers = {{"sgd", OptimizerKind::kSgd},
                                              {"adam", OptimizerKind::kAdam}};
const NameTable<InitScheme> kInits = {{"xavier_uniform", InitScheme::kXavierUniform},
                                      {"gaussian", InitScheme::kGaussian}};
const NameTable<MlpLoss> kLosses = {{"cross_entropy", MlpLoss::kCrossEntropy},
                                    {"mse", MlpLoss::kMse}};
const NameTable<Head> kHeads = {{"softmax", Head::kSoftmax},
                                {"sigmoid", Head::kSigmoid},
                                {"identity", Head::kIdentity}};

template <typename E>
std::string_view NameOf(const NameTable<E>& table, E value) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

// Walks one JSON object, recording type errors and unknown keys instead of
// throwing so every problem can be reported at once.
class Reader {
 public:
  Reader(const json* obj, std::string path, std::vector<std::string>* problems)
      : obj_(obj), path_(std::move(path)), problems_(problems) {
    if (obj_ != nullptr && !obj_->is_object()) {
      problems_->push_back(path_ + ": expected an object");
      obj_ = nullptr;
    }
  }

  ~Reader() {
    if (obj_ == nullptr) return;
    for (const auto& [key, value] : obj_->items()) {
      if (!used_.contains(key)) problems_->push_back(Where(key) + ": unknown key");
    }
  }

  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  template <typename T>
  void Get(const std::string& key, T& out) {
    const json* v = Find(key);
    if (v == nullptr) return;
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      problems_->push_back(Where(key) + ": wrong type (" + std::string(v->type_name()) + ")");
    }
  }

  template <typename T>
  void GetOptional(const std::string& key, std::optional<T>& out) {
    const json* v = Find(key);
    if (v == nullptr) return;
    if (v->is_null()) {
      out.reset();
      return;
    }
    T value{};
    Get(key, value);
    out = value;
  }

  template <typename E>
  void GetEnum(const std::string& key, const NameTable<E>& table, E& out) {
    std::string name;
    const std::size_t before = problems_->size();
    Get(key, name);
    if (problems_->size() != before || Find(key) == nullptr) return;
    for (const auto& [n, v] : table) {
      if (n == name) {
        out = v;
        return;
      }
    }
    std::string choices;
    for (const auto& [n, v] : table) choices += (choices.empty() ? "" : "|") + std::string(n);
    problems_->push_back(Where(key) + ": unknown value '" + name + "' (expected " + choices + ")");
  }

  void GetDelimiter(const std::string& key, char& out) {
    std::string s;
    const std::size_t before = problems_->size();
    Get(key, s);
    if (problems_->size() != before || Find(key) == nullptr) return;
    if (s.size() != 1) {
      problems_->push_back(Where(key) + ": must be a single character");
      return;
    }
    out = s[0];
  }

  Reader Child(const std::string& key) { return Reader(Find(key), Where(key), problems_); }

 private:
  const json* Find(const std::string& key) {
    if (obj_ == nullptr) return nullptr;
    used_.insert(key);
    const auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  std::string Where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* obj_;
  std::string path_;
  std::vector<std::string>* problems_;
  std::set<std::string> used_;
};

void ReadLogReg(Reader r, LogRegConfig& c) {
  r.Get("learning_rate", c.learning_rate);
  r.Get("momentum", c.momentum);
  r.Get("epochs", c.epochs);
  r.Get("batch_size", c.batch_size);
  r.Get("binary_single_row", c.binary_single_row);
  r.Get("fit_bias", c.fit_bias);
  r.Get("weight_decay", c.weight_decay);
}

void ReadMlp(Reader r, MlpTrainConfig& c) {
  r.Get("hidden", c.hidden);
  r.GetEnum("head", kHeads, c.head);
  r.Get("layer_norm", c.layer_norm);
  r.Get("dropout", c.dropout);
  r.GetEnum("loss", kLosses, c.loss);
  r.GetEnum("optimizer", kOptimizers, c.optimizer);
  r.Get("learning_rate", c.learning_rate);
  r.Get("momentum", c.momentum);
  r.Get("weight_decay", c.weight_decay);
  r.Get("epochs", c.epochs);
  r.Get("batch_size", c.batch_size);
  r.GetEnum("init", kInits, c.init);
  r.Get("init_scale", c.init_scale);
}

void ReadTree(Reader r, TreeConfig& c) {
  r.Get("max_depth", c.max_depth);
  r.Get("min_leaf", c.min_leaf);
  r.Get("max_features", c.max_features);
}

void ReadForest(Reader r, ForestConfig& c) {
  r.Get("num_trees", c.num_trees);
  r.Get("max_depth", c.max_depth);
  r.Get("min_leaf", c.min_leaf);
  r.Get("max_features", c.max_features);
  r.Get("bootstrap", c.bootstrap);
}

void ReadGrn(Reader r, GrnConfig& c) {
  r.Get("hidden", c.hidden);
  r.Get("layer_norm", c.layer_norm);
  r.Get("epochs", c.epochs);
  r.Get("batch_size", c.batch_size);
  r.GetEnum("optimizer", kOptimizers, c.optimizer);
  r.Get("learning_rate", c.learning_rate);
  r.Get("momentum", c.momentum);
  r.Get("variance_weight", c.variance_weight);
  r.Get("variance_threshold", c.variance_threshold);
  r.Get("squash", c.squash);
  r.GetEnum("init", kInits, c.init);
  r.Get("init_scale", c.init_scale);
  r.Get("use_adv_input", c.use_adv_input);
  r.Get("use_noise", c.use_noise);
}

void ReadConfig(const json& root, ExperimentConfig& cfg, std::vector<std::string>& problems) {
  Reader r(&root, "", &problems);
  {
    Reader d = r.Child("dataset");
    d.Get("name", cfg.dataset.name);
    std::optional<std::string> csv;
    d.GetOptional("csv", csv);
    if (csv) cfg.dataset.csv = *csv;
    d.Get("label_column", cfg.dataset.label_column);
    d.GetDelimiter("delimiter", cfg.dataset.delimiter);
    d.Get("normalize", cfg.dataset.normalize);
    Reader s = d.Child("synth");
    s.Get("n", cfg.dataset.synth.n);
    s.Get("d", cfg.dataset.synth.d);
    s.Get("c", cfg.dataset.synth.c);
    s.Get("class_sep", cfg.dataset.synth.class_sep);
    s.Get("mix_strength", cfg.dataset.synth.mix_strength);
    s.Get("seed", cfg.dataset.synth.seed);
  }
  {
    Reader m = r.Child("model");
    m.GetEnum("kind", kModelKinds, cfg.model.kind);
    ReadLogReg(m.Child("logreg"), cfg.model.logreg);
    ReadMlp(m.Child("mlp"), cfg.model.mlp);
    ReadTree(m.Child("tree"), cfg.model.tree);
    ReadForest(m.Child("forest"), cfg.model.forest);
  }
  {
    Reader a = r.Child("attack");
    a.GetEnum("kind", kAttackKinds, cfg.attack.kind);
    a.Get("pinv_cutoff", cfg.attack.pinv_cutoff);
    ReadGrn(a.Child("grn"), cfg.attack.grn);
    {
      Reader n = a.Child("naive");
      n.Get("iterations", cfg.attack.naive.iterations);
      n.Get("learning_rate", cfg.attack.naive.learning_rate);
    }
    {
      Reader s = a.Child("surrogate");
      s.Get("num_dummy", cfg.attack.surrogate.num_dummy);
      s.Get("num_holdout", cfg.attack.surrogate.num_holdout);
      s.Get("hidden", cfg.attack.surrogate.hidden);
      ReadMlp(s.Child("train"), cfg.attack.surrogate.train);
    }
  }
  {
    Reader d = r.Child("defense");
    d.GetOptional("rounding_digits", cfg.defense.rounding_digits);
    d.Get("dropout", cfg.defense.dropout);
  }
  r.Get("fractions", cfg.fractions);
  r.Get("trials", cfg.trials);
  {
    Reader s = r.Child("split");
    s.Get("train", cfg.split.train);
    s.Get("test", cfg.split.test);
    s.Get("pred", cfg.split.pred);
  }
  r.Get("seed", cfg.seed);
  r.Get("freeze_model", cfg.freeze_model);
  r.Get("timing", cfg.timing);
}

ordered_json MlpToJson(const MlpTrainConfig& c) {
  return ordered_json{{"hidden", c.hidden},
                      {"head", NameOf(kHeads, c.head)},
                      {"layer_norm", c.layer_norm},
                      {"dropout", c.dropout},
                      {"loss", NameOf(kLosses, c.loss)},
                      {"optimizer", NameOf(kOptimizers, c.optimizer)},
                      {"learning_rate", c.learning_rate},
                      {"momentum", c.momentum},
                      {"weight_decay", c.weight_decay},
                      {"epochs", c.epochs},
                      {"batch_size", c.batch_size},
                      {"init", NameOf(kInits, c.init)},
                      {"init_scale", c.init_scale}};
}

void CheckPositive(double v, const std::string& what, std::vector<std::string>& p) {
  if (!(v > 0.0) || !std::isfinite(v)) p.push_back(what + " must be positive");
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) { return NameOf(kModelKinds, kind); }
std::string_view attack_kind_name(AttackKind kind) { return NameOf(kAttackKinds, kind); }

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> p;
  const auto& ds = cfg.dataset;
  if (ds.name.empty()) p.push_back("dataset.name must not be empty");
  if (!ds.csv) {
    if (ds.synth.d < 2) p.push_back("dataset.synth.d must be at least 2");
    if (ds.synth.c < 2) p.push_back("dataset.synth.c must be at least 2");
    if (ds.synth.c >= 2 && ds.synth.n < static_cast<std::size_t>(ds.synth.c)) {
      p.push_back("dataset.synth.n must be at least dataset.synth.c");
    }
    CheckPositive(ds.synth.class_sep, "dataset.synth.class_sep", p);
    if (!(ds.synth.mix_strength >= 0.0 && ds.synth.mix_strength <= 1.0)) {
      p.push_back("dataset.synth.mix_strength must lie in [0, 1]");
    }
  } else if (!std::filesystem::exists(*ds.csv)) {
    p.push_back("dataset.csv: file not found: " + ds.csv->string());
  }

  if (cfg.fractions.empty()) p.push_back("fractions must not be empty");
  for (double f : cfg.fractions) {
    if (!(f > 0.0 && f < 1.0)) p.push_back("fractions entries must lie in (0, 1)");
  }
  if (cfg.trials < 1) p.push_back("trials must be at least 1");
  const auto& s = cfg.split;
  if (s.train < 0 || s.test < 0 || s.pred < 0) p.push_back("split fractions must be >= 0");
  if (s.train + s.test + s.pred > 1.0 + 1e-12) p.push_back("split fractions sum to more than 1");
  if (!(s.train > 0)) p.push_back("split.train must be positive");
  if (!(s.pred > 0)) p.push_back("split.pred must be positive");

  if (cfg.defense.rounding_digits && *cfg.defense.rounding_digits < 1) {
    p.push_back("defense.rounding_digits must be at least 1");
  }
  if (!(cfg.defense.dropout >= 0.0 && cfg.defense.dropout < 1.0)) {
    p.push_back("defense.dropout must lie in [0, 1)");
  }
  if (cfg.defense.dropout > 0.0 && cfg.model.kind != ModelKind::kMlp) {
    p.push_back("defense.dropout only applies to model.kind = mlp");
  }

  const auto& m = cfg.model;
  if (m.kind == ModelKind::kLogReg) {
    CheckPositive(m.logreg.learning_rate, "model.logreg.learning_rate", p);
    if (m.logreg.epochs < 0) p.push_back("model.logreg.epochs must be >= 0");
    if (m.logreg.batch_size == 0) p.push_back("model.logreg.batch_size must be positive");
  }
  if (m.kind == ModelKind::kMlp) {
    CheckPositive(m.mlp.learning_rate, "model.mlp.learning_rate", p);
    if (m.mlp.epochs < 0) p.push_back("model.mlp.epochs must be >= 0");
    if (m.mlp.batch_size == 0) p.push_back("model.mlp.batch_size must be positive");
    if (m.mlp.head != Head::kSoftmax) p.push_back("model.mlp.head must be softmax");
    if (!(m.mlp.dropout >= 0.0 && m.mlp.dropout < 1.0)) {
      p.push_back("model.mlp.dropout must lie in [0, 1)");
    }
  }
  if (m.kind == ModelKind::kTree && (m.tree.max_depth < 0 || m.tree.max_depth > 20)) {
    p.push_back("model.tree.max_depth must lie in [0, 20]");
  }
  if (m.kind == ModelKind::kForest) {
    if (m.forest.num_trees < 1) p.push_back("model.forest.num_trees must be at least 1");
    if (m.forest.max_depth < 0 || m.forest.max_depth > 20) {
      p.push_back("model.forest.max_depth must lie in [0, 20]");
    }
  }

  const auto& a = cfg.attack;
  if (a.kind == AttackKind::kEsa && m.kind != ModelKind::kLogReg) {
    p.push_back("attack.kind = esa requires model.kind = logreg");
  }
  if (a.kind == AttackKind::kPra && m.kind != ModelKind::kTree) {
    p.push_back("attack.kind = pra requires model.kind = tree");
  }
  if (!(a.pinv_cutoff > 0.0 && a.pinv_cutoff < 1.0)) {
    p.push_back("attack.pinv_cutoff must lie in (0, 1)");
  }
  if (a.kind == AttackKind::kGrna) {
    if (a.grn.epochs < 0) p.push_back("attack.grn.epochs must be >= 0");
    if (a.grn.batch_size == 0) p.push_back("attack.grn.batch_size must be positive");
    CheckPositive(a.grn.learning_rate, "attack.grn.learning_rate", p);
    if (!a.grn.use_adv_input && !a.grn.use_noise) {
      p.push_back("attack.grn needs use_adv_input or use_noise");
    }
    if (a.grn.variance_weight < 0) p.push_back("attack.grn.variance_weight must be >= 0");
  }
  if (a.kind == AttackKind::kNaiveRegression && a.naive.iterations < 0) {
    p.push_back("attack.naive.iterations must be >= 0");
  }
  const bool needs_surrogate = (a.kind == AttackKind::kGrna ||
                                a.kind == AttackKind::kNaiveRegression) &&
                               (m.kind == ModelKind::kTree || m.kind == ModelKind::kForest);
  if (needs_surrogate) {
    CheckPositive(a.surrogate.train.learning_rate, "attack.surrogate.train.learning_rate", p);
    if (a.surrogate.train.batch_size == 0) {
      p.push_back("attack.surrogate.train.batch_size must be positive");
    }
  }
  return p;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }
  ExperimentConfig cfg;
  std::vector<std::string> problems;
  ReadConfig(root, cfg, problems);
  for (auto& problem : validate_config(cfg)) problems.push_back(std::move(problem));
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path.string()});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  const auto& ds = cfg.dataset;
  ordered_json j;
  j["dataset"] = ordered_json{
      {"name", ds.name},
      {"csv", ds.csv ? ordered_json(ds.csv->string()) : ordered_json(nullptr)},
      {"label_column", ds.label_column},
      {"delimiter", std::string(1, ds.delimiter)},
      {"normalize", ds.normalize},
      {"synth", ordered_json{{"n", ds.synth.n},
                             {"d", ds.synth.d},
                             {"c", ds.synth.c},
                             {"class_sep", ds.synth.class_sep},
                             {"mix_strength", ds.synth.mix_strength},
                             {"seed", ds.synth.seed}}}};
  const auto& m = cfg.model;
  j["model"] = ordered_json{
      {"kind", model_kind_name(m.kind)},
      {"logreg", ordered_json{{"learning_rate", m.logreg.learning_rate},
                              {"momentum", m.logreg.momentum},
                              {"epochs", m.logreg.epochs},
                              {"batch_size", m.logreg.batch_size},
                              {"binary_single_row", m.logreg.binary_single_row},
                              {"fit_bias", m.logreg.fit_bias},
                              {"weight_decay", m.logreg.weight_decay}}},
      {"mlp", MlpToJson(m.mlp)},
      {"tree", ordered_json{{"max_depth", m.tree.max_depth},
                            {"min_leaf", m.tree.min_leaf},
                            {"max_features", m.tree.max_features}}},
      {"forest", ordered_json{{"num_trees", m.forest.num_trees},
                              {"max_depth", m.forest.max_depth},
                              {"min_leaf", m.forest.min_leaf},
                              {"max_features", m.forest.max_features},
                              {"bootstrap", m.forest.bootstrap}}}};
  const auto& a = cfg.attack;
  const auto& g = a.grn;
  j["attack"] = ordered_json{
      {"kind", attack_kind_name(a.kind)},
      {"pinv_cutoff", a.pinv_cutoff},
      {"grn", ordered_json{{"hidden", g.hidden},
                           {"layer_norm", g.layer_norm},
                           {"epochs", g.epochs},
                           {"batch_size", g.batch_size},
                           {"optimizer", NameOf(kOptimizers, g.optimizer)},
                           {"learning_rate", g.learning_rate},
                           {"momentum", g.momentum},
                           {"variance_weight", g.variance_weight},
                           {"variance_threshold", g.variance_threshold},
                           {"squash", g.squash},
                           {"init", NameOf(kInits, g.init)},
                           {"init_scale", g.init_scale},
                           {"use_adv_input", g.use_adv_input},
                           {"use_noise", g.use_noise}}},
      {"naive", ordered_json{{"iterations", a.naive.iterations},
                             {"learning_rate", a.naive.learning_rate}}},
      {"surrogate", ordered_json{{"num_dummy", a.surrogate.num_dummy},
                                 {"num_holdout", a.surrogate.num_holdout},
                                 {"hidden", a.surrogate.hidden},
                                 {"train", MlpToJson(a.surrogate.train)}}}};
  j["defense"] = ordered_json{
      {"rounding_digits", cfg.defense.rounding_digits ? ordered_json(*cfg.defense.rounding_digits)
                                                      : ordered_json(nullptr)},
      {"dropout", cfg.defense.dropout}};
  j["fractions"] = cfg.fractions;
  j["trials"] = cfg.trials;
  j["split"] = ordered_json{
      {"train", cfg.split.train}, {"test", cfg.split.test}, {"pred", cfg.split.pred}};
  j["seed"] = cfg.seed;
  j["freeze_model"] = cfg.freeze_model;
  j["timing"] = cfg.timing;
  return j.dump(2);
}

}  // namespace vfl
