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

#include "vfl/models/model.h"

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "vfl/errors.h"

namespace vfl {
namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json MatrixToJson(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row_vector(r));
  return rows;
}

Matrix MatrixFromJson(const json& j) {
  return Matrix::FromRows(j.get<std::vector<Vector>>());
}

std::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kInternal:
      return "internal";
    case NodeKind::kLeaf:
      return "leaf";
    case NodeKind::kReplica:
      return "replica";
  }
  return "leaf";
}

json TreeToJson(const DecisionTree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    json node{{"type", NodeKindName(n.kind)}};
    if (n.kind == NodeKind::kInternal) {
      node["feature"] = n.feature;
      node["threshold"] = n.threshold;
    }
    node["label"] = n.label;
    nodes.push_back(std::move(node));
  }
  return json{{"kind", "tree"},
              {"depth", t.depth},
              {"num_classes", t.num_classes},
              {"num_features", t.num_features},
              {"nodes", std::move(nodes)}};
}

DecisionTree TreeFromJson(const json& j) {
  DecisionTree t;
  t.depth = j.at("depth").get<int>();
  t.num_classes = j.at("num_classes").get<int>();
  t.num_features = j.at("num_features").get<std::size_t>();
  for (const auto& n : j.at("nodes")) {
    const auto type = n.at("type").get<std::string>();
    TreeNode node;
    node.label = n.at("label").get<int>();
    if (type == "internal") {
      node.kind = NodeKind::kInternal;
      node.feature = n.at("feature").get<int>();
      node.threshold = n.at("threshold").get<double>();
    } else if (type == "leaf") {
      node.kind = NodeKind::kLeaf;
    } else if (type == "replica") {
      node.kind = NodeKind::kReplica;
    } else {
      throw ParseError("unknown tree node type '" + type + "'", 0);
    }
    t.nodes.push_back(node);
  }
  t.validate();
  return t;
}

json ToJson(const TrainedModel& model) {
  return std::visit(
      Overloaded{
          [](const LogRegModel& m) {
            return json{{"kind", "logreg"},
                        {"num_classes", m.num_classes},
                        {"weights", MatrixToJson(m.weights)},
                        {"bias", m.bias}};
          },
          [](const MlpModel& m) {
            json layers = json::array();
            for (const auto& l : m.layers) {
              layers.push_back(json{{"weight", MatrixToJson(l.weight)},
                                    {"bias", l.bias},
                                    {"ln_gain", l.ln_gain},
                                    {"ln_bias", l.ln_bias},
                                    {"dropout", l.dropout}});
            }
            return json{{"kind", "mlp"},
                        {"sizes", m.sizes},
                        {"head", head_name(m.head)},
                        {"layer_norm", m.layer_norm},
                        {"layers", std::move(layers)}};
          },
          [](const DecisionTree& t) { return TreeToJson(t); },
          [](const RandomForest& f) {
            json trees = json::array();
            for (const auto& t : f.trees) trees.push_back(TreeToJson(t));
            return json{{"kind", "forest"},
                        {"num_classes", f.num_classes},
                        {"trees", std::move(trees)}};
          },
      },
      model);
}

TrainedModel FromJson(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "logreg") {
    LogRegModel m;
    m.num_classes = j.at("num_classes").get<int>();
    m.weights = MatrixFromJson(j.at("weights"));
    m.bias = j.value("bias", Vector{});
    m.validate();
    return m;
  }
  if (kind == "mlp") {
    MlpModel m;
    m.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    m.head = parse_head(j.at("head").get<std::string>());
    m.layer_norm = j.at("layer_norm").get<bool>();
    for (const auto& l : j.at("layers")) {
      DenseLayer layer;
      layer.weight = MatrixFromJson(l.at("weight"));
      layer.bias = l.at("bias").get<Vector>();
      layer.ln_gain = l.value("ln_gain", Vector{});
      layer.ln_bias = l.value("ln_bias", Vector{});
      layer.dropout = l.value("dropout", 0.0);
      m.layers.push_back(std::move(layer));
    }
    m.validate();
    return m;
  }
  if (kind == "tree") return TreeFromJson(j);
  if (kind == "forest") {
    RandomForest f;
    f.num_classes = j.at("num_classes").get<int>();
    for (const auto& t : j.at("trees")) f.trees.push_back(TreeFromJson(t));
    f.validate();
    return f;
  }
  throw ParseError("unknown model kind '" + kind + "'", 0);
}

}  // namespace

std::string_view model_kind(const TrainedModel& model) {
  return std::visit(Overloaded{
                        [](const LogRegModel&) { return std::string_view("logreg"); },
                        [](const MlpModel&) { return std::string_view("mlp"); },
                        [](const DecisionTree&) { return std::string_view("tree"); },
                        [](const RandomForest&) { return std::string_view("forest"); },
                    },
                    model);
}

std::size_t model_num_classes(const TrainedModel& model) {
  return std::visit(
      Overloaded{
          [](const LogRegModel& m) { return static_cast<std::size_t>(m.num_classes); },
          [](const MlpModel& m) { return m.output_size(); },
          [](const DecisionTree& t) { return static_cast<std::size_t>(t.num_classes); },
          [](const RandomForest& f) { return static_cast<std::size_t>(f.num_classes); },
      },
      model);
}

std::size_t model_num_features(const TrainedModel& model) {
  return std::visit(Overloaded{
                        [](const LogRegModel& m) { return m.num_features(); },
                        [](const MlpModel& m) { return m.input_size(); },
                        [](const DecisionTree& t) { return t.num_features; },
                        [](const RandomForest& f) { return f.num_features(); },
                    },
                    model);
}

Vector predict(const TrainedModel& model, std::span<const double> x) {
  return std::visit(
      Overloaded{
          [&](const LogRegModel& m) { return predict_logreg(m, x); },
          [&](const MlpModel& m) { return mlp_predict(m, x); },
          [&](const DecisionTree& t) { return predict_tree_scores(t, x); },
          [&](const RandomForest& f) { return predict_forest(f, x); },
      },
      model);
}

Matrix predict_rows(const TrainedModel& model, const Matrix& x) {
  if (const auto* m = std::get_if<LogRegModel>(&model)) return predict_logreg_rows(*m, x);
  if (const auto* m = std::get_if<MlpModel>(&model)) return mlp_forward(*m, x);
  Matrix out(x.rows(), model_num_classes(model));
  for (std::size_t r = 0; r < x.rows(); ++r) out.set_row(r, predict(model, x.row(r)));
  return out;
}

bool is_differentiable(const TrainedModel& model) {
  return std::holds_alternative<LogRegModel>(model) || std::holds_alternative<MlpModel>(model);
}

std::string model_to_json(const TrainedModel& model) { return ToJson(model).dump(); }

TrainedModel model_from_json(std::string_view text) {
  try {
    return FromJson(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("model json: ") + e.what(), 0);
  }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << model_to_json(model) << '\n';
  if (!out) throw InputError("write failed for " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

DifferentiableModel::DifferentiableModel(const TrainedModel& model) {
  if (const auto* m = std::get_if<LogRegModel>(&model)) {
    logreg_ = m;
  } else if (const auto* m = std::get_if<MlpModel>(&model)) {
    mlp_ = m;
  } else {
    throw ModelKindError(std::string(model_kind(model)) +
                         " models are not differentiable; distill a surrogate first");
  }
}

DifferentiableModel::DifferentiableModel(const MlpModel& model) : mlp_(&model) {}

std::size_t DifferentiableModel::input_size() const {
  return logreg_ ? logreg_->num_features() : mlp_->input_size();
}

std::size_t DifferentiableModel::output_size() const {
  return logreg_ ? static_cast<std::size_t>(logreg_->num_classes) : mlp_->output_size();
}

Matrix DifferentiableModel::forward(const Matrix& x) {
  if (logreg_) {
    last_input_ = x;
    return predict_logreg_rows(*logreg_, x);
  }
  return mlp_forward(*mlp_, x, false, nullptr, &cache_);
}

Matrix DifferentiableModel::input_gradient(const Matrix& grad_output) const {
  if (logreg_) return logreg_input_grad(*logreg_, last_input_, grad_output);
  return mlp_backward(*mlp_, cache_, grad_output, /*param_grads=*/false).input;
}

}  // namespace vfl
