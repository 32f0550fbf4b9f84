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


#ifndef VFL_HARNESS_EXPERIMENT_H_
#define VFL_HARNESS_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vfl/data/dataset.h"
#include "vfl/harness/config.h"
#include "vfl/harness/report.h"
#include "vfl/linalg/matrix.h"
#include "vfl/models/model.h"

namespace vfl {

// Rounding defense: every entry becomes floor(v * 10^b) / 10^b. The result
// is not renormalised. Throws InputError for b < 1.
Vector apply_rounding(std::span<const double> v, int digits);
Matrix apply_rounding_rows(const Matrix& v, int digits);

// Loads the CSV (or generates the synthetic set) and normalises it when asked.
Dataset load_experiment_data(const DatasetSpec& spec);

// Trains the configured model family; the dropout defense overrides the
// MLP dropout rate.
TrainedModel train_vertical_model(const ModelSpec& spec, const DefenseSpec& defense,
                                  const Dataset& train, std::uint64_t seed);

// Child seed of one (fraction index, trial) cell.
std::uint64_t trial_seed(std::uint64_t master, std::size_t fraction_index, int trial);

// Report labels.
std::string defense_label(const DefenseSpec& defense);
std::string attack_label(const AttackSpec& attack);

struct RunOptions {
  // Worker threads; trials are independent so any value gives the same report.
  std::size_t parallel = 1;
};

// Records for one cell: the attack record followed by the uniform and
// gaussian baseline records.
std::vector<ReportRecord> run_trial(const ExperimentConfig& cfg, const Dataset& data,
                                    std::size_t fraction_index, int trial,
                                    const TrainedModel* frozen_model = nullptr);

// Every fraction x trial cell, ordered by (fraction, trial) whatever the
// completion order. Throws ConfigError when the config does not validate.
std::vector<ReportRecord> run_experiment(const ExperimentConfig& cfg,
                                         const RunOptions& options = {});

}  // namespace vfl

#endif  // VFL_HARNESS_EXPERIMENT_H_
