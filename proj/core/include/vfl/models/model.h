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

#ifndef VFL_MODELS_MODEL_H_
#define VFL_MODELS_MODEL_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "vfl/linalg/matrix.h"
#include "vfl/models/logreg.h"
#include "vfl/models/mlp.h"
#include "vfl/models/tree.h"

namespace vfl {

using TrainedModel = std::variant<LogRegModel, MlpModel, DecisionTree, RandomForest>;

// "logreg", "mlp", "tree" or "forest".
std::string_view model_kind(const TrainedModel& model);
std::size_t model_num_classes(const TrainedModel& model);
std::size_t model_num_features(const TrainedModel& model);

// Confidence vector v for one sample (or every row of x).
Vector predict(const TrainedModel& model, std::span<const double> x);
Matrix predict_rows(const TrainedModel& model, const Matrix& x);

bool is_differentiable(const TrainedModel& model);

// JSON schema documented in docs/schemas.md.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(std::string_view text);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

// Frozen model that can push a loss gradient back to its inputs. Holds a
// reference; the model must outlive the view.
class DifferentiableModel {
 public:
  // Throws ModelKindError for trees and forests.
  explicit DifferentiableModel(const TrainedModel& model);
  explicit DifferentiableModel(const MlpModel& model);

  std::size_t input_size() const;
  std::size_t output_size() const;

  // Inference-mode forward pass; remembers x for input_gradient().
  Matrix forward(const Matrix& x);
  // d loss / d x for the batch passed to the last forward().
  Matrix input_gradient(const Matrix& grad_output) const;

 private:
  const LogRegModel* logreg_ = nullptr;
  const MlpModel* mlp_ = nullptr;
  Matrix last_input_;
  MlpCache cache_;
};

}  // namespace vfl

#endif  // VFL_MODELS_MODEL_H_
