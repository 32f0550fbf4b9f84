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


#ifndef VFL_HARNESS_CONFIG_H_
#define VFL_HARNESS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vfl/attacks/grn.h"
#include "vfl/attacks/surrogate.h"
#include "vfl/data/dataset.h"
#include "vfl/linalg/svd.h"
#include "vfl/models/logreg.h"
#include "vfl/models/mlp.h"
#include "vfl/models/tree.h"

namespace vfl {

struct DatasetSpec {
  // Label used in report records.
  std::string name = "synthetic";
  // CSV file; when absent the synthetic generator is used.
  std::optional<std::filesystem::path> csv;
  std::string label_column = "label";
  char delimiter = ',';
  SynthConfig synth;
  // Min-max normalise every feature into [0, 1] before anything else.
  bool normalize = true;
};

enum class ModelKind { kLogReg, kMlp, kTree, kForest };
std::string_view model_kind_name(ModelKind kind);

struct ModelSpec {
  ModelKind kind = ModelKind::kLogReg;
  LogRegConfig logreg;
  MlpTrainConfig mlp;
  TreeConfig tree;
  ForestConfig forest;
};

enum class AttackKind {
  kEsa,
  kPra,
  kGrna,
  kNaiveRegression,
  // Only the two random-guess baselines.
  kBaselines,
};
std::string_view attack_kind_name(AttackKind kind);

struct AttackSpec {
  AttackKind kind = AttackKind::kEsa;
  double pinv_cutoff = kDefaultPinvCutoff;
  GrnConfig grn;
  NaiveRegressionConfig naive;
  // num_dummy == 0 (the default here) selects default_dummy_count(n_pred).
  SurrogateConfig surrogate = [] {
    SurrogateConfig s;
    s.num_dummy = 0;
    return s;
  }();
};

struct DefenseSpec {
  // Truncate released confidence scores to this many decimal digits.
  std::optional<int> rounding_digits;
  // Dropout rate used when training the vertical neural network.
  double dropout = 0.0;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  ModelSpec model;
  AttackSpec attack;
  DefenseSpec defense;
  std::vector<double> fractions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  int trials = 10;
  SplitFractions split;
  std::uint64_t seed = 0;
  // Train the vertical model once and reuse it for every trial.
  bool freeze_model = false;
  // Record wall-clock runtime_ms; off by default so reports are byte-stable.
  bool timing = false;
};

// Every problem found, empty when the config is usable.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

// JSON whose keys mirror the field names above (see docs/schemas.md).
// Unknown keys and type errors are reported together with validation
// problems in a single ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace vfl

#endif  // VFL_HARNESS_CONFIG_H_
