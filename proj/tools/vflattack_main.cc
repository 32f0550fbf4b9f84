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


// Command line front end: synth, train, attack, bound and report.
//
// Exit codes: 0 success, 1 invalid input or configuration, 2 runtime failure.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vfl/data/dataset.h"
#include "vfl/errors.h"
#include "vfl/harness/config.h"
#include "vfl/harness/experiment.h"
#include "vfl/harness/report.h"
#include "vfl/linalg/rng.h"
#include "vfl/metrics/metrics.h"
#include "vfl/models/model.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

// Flags shared by every subcommand.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "jsonl";
  std::size_t parallel = 1;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", flags.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", flags.format, "Report format")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  cmd->add_option("--parallel", flags.parallel, "Worker threads")->check(CLI::PositiveNumber);
}

// Writes through `fn` to --out, or to stdout when no path was given.
template <typename Fn>
void WithOutput(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vfl::InputError("cannot write " + path);
  fn(out);
  if (!out) throw vfl::InputError("write failed for " + path);
}

vfl::ExperimentConfig LoadExperiment(const CommonFlags& flags) {
  if (flags.config.empty()) throw vfl::ConfigError({"--config is required"});
  vfl::ExperimentConfig cfg = vfl::load_config(flags.config);
  if (flags.seed) cfg.seed = *flags.seed;
  return cfg;
}

int RunSynth(const CommonFlags& flags, vfl::SynthConfig cfg) {
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto j = nlohmann::json::parse(buf.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw vfl::ConfigError({"synth config: bad JSON"});
    std::vector<std::string> problems;
    for (const auto& [key, value] : j.items()) {
      try {
        if (key == "n") cfg.n = value.get<std::size_t>();
        else if (key == "d") cfg.d = value.get<std::size_t>();
        else if (key == "c") cfg.c = value.get<int>();
        else if (key == "class_sep") cfg.class_sep = value.get<double>();
        else if (key == "mix_strength") cfg.mix_strength = value.get<double>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else problems.push_back(key + ": unknown key");
      } catch (const nlohmann::json::exception&) {
        problems.push_back(key + ": wrong type");
      }
    }
    if (!problems.empty()) throw vfl::ConfigError(problems);
  }
  if (flags.seed) cfg.seed = *flags.seed;
  const vfl::Dataset data = vfl::synth_generate(cfg);
  WithOutput(flags.out, [&](std::ostream& out) { vfl::write_csv(out, data); });
  std::fprintf(stderr, "synth: %zu samples, %zu features, %d classes\n", data.size(),
               data.num_features(), data.num_classes);
  return kExitOk;
}

int RunTrain(const CommonFlags& flags) {
  const vfl::ExperimentConfig cfg = LoadExperiment(flags);
  const vfl::Dataset data = vfl::load_experiment_data(cfg.dataset);
  const vfl::DatasetSplit split =
      vfl::split_dataset(data, cfg.split, vfl::Rng::derive_seed(cfg.seed, {0}));
  const vfl::TrainedModel model = vfl::train_vertical_model(
      cfg.model, cfg.defense, split.train, vfl::Rng::derive_seed(cfg.seed, {1}));
  WithOutput(flags.out, [&](std::ostream& out) { out << vfl::model_to_json(model) << '\n'; });

  const vfl::Dataset& eval = split.test.size() > 0 ? split.test : split.train;
  const vfl::Matrix scores = vfl::predict_rows(model, eval.features);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < eval.size(); ++r) {
    const auto row = scores.row(r);
    const auto pick = std::max_element(row.begin(), row.end()) - row.begin();
    if (pick == static_cast<std::ptrdiff_t>(eval.labels[r])) ++correct;
  }
  std::fprintf(stderr, "train: %s model, %s accuracy %.4f on %zu samples\n",
               std::string(vfl::model_kind(model)).c_str(),
               split.test.size() > 0 ? "test" : "train",
               eval.size() == 0 ? 0.0 : static_cast<double>(correct) / eval.size(), eval.size());
  return kExitOk;
}

int RunAttack(const CommonFlags& flags) {
  const vfl::ExperimentConfig cfg = LoadExperiment(flags);
  const auto records = vfl::run_experiment(cfg, {flags.parallel});
  const auto format = vfl::parse_report_format(flags.format);
  if (flags.out.empty()) {
    vfl::write_report(std::cout, records, format);
  } else {
    vfl::emit_report(records, flags.out, format);
  }
  return kExitOk;
}

int RunBound(const CommonFlags& flags, const std::string& data_path,
             const std::string& label_column) {
  vfl::DatasetSpec spec;
  if (!data_path.empty()) {
    spec.csv = data_path;
    spec.label_column = label_column;
    spec.name = std::filesystem::path(data_path).stem().string();
  } else if (!flags.config.empty()) {
    spec = LoadExperiment(flags).dataset;
  } else {
    throw vfl::ConfigError({"bound needs --data or --config"});
  }
  spec.normalize = true;
  const vfl::Dataset data = vfl::load_experiment_data(spec);
  const double bound = vfl::mse_upper_bound(data.features);
  WithOutput(flags.out, [&](std::ostream& out) {
    const nlohmann::ordered_json row{{"dataset", spec.name},
                                     {"n", data.size()},
                                     {"d", data.num_features()},
                                     {"c", data.num_classes},
                                     {"upper_bound", bound}};
    if (flags.format == "csv") {
      out << "dataset,n,d,c,upper_bound\n"
          << spec.name << ',' << data.size() << ',' << data.num_features() << ','
          << data.num_classes << ',' << row["upper_bound"].dump() << '\n';
    } else {
      out << row.dump() << '\n';
    }
  });
  return kExitOk;
}

int RunReport(const CommonFlags& flags, const std::string& input) {
  const auto records = vfl::load_report(input);
  if (records.empty()) throw vfl::InputError("report " + input + " has no records");
  const auto rows = vfl::aggregate_mean(records);
  const auto format = vfl::parse_report_format(flags.format);
  WithOutput(flags.out, [&](std::ostream& out) { vfl::write_aggregate(out, rows, format); });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature inference attacks against vertically partitioned models"};
  app.require_subcommand(1);

  CommonFlags flags;
  vfl::SynthConfig synth;
  std::string data_path;
  std::string label_column = "label";
  std::string report_input;

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset as CSV");
  AddCommonFlags(synth_cmd, flags);
  synth_cmd->add_option("--n", synth.n, "Samples");
  synth_cmd->add_option("--d", synth.d, "Features");
  synth_cmd->add_option("--c", synth.c, "Classes");
  synth_cmd->add_option("--class-sep", synth.class_sep, "Class separation");
  synth_cmd->add_option("--mix-strength", synth.mix_strength, "Feature mixing in [0, 1]");

  auto* train_cmd = app.add_subcommand("train", "Train the configured model and save it as JSON");
  AddCommonFlags(train_cmd, flags);

  auto* attack_cmd =
      app.add_subcommand("attack", "Run the configured attack grid and write a report");
  AddCommonFlags(attack_cmd, flags);

  auto* bound_cmd =
      app.add_subcommand("bound", "MSE upper bound of a dataset after min-max normalisation");
  AddCommonFlags(bound_cmd, flags);
  bound_cmd->add_option("--data", data_path, "CSV file")->check(CLI::ExistingFile);
  bound_cmd->add_option("--label-column", label_column, "Label column name");

  auto* report_cmd = app.add_subcommand("report", "Average a report over trials");
  AddCommonFlags(report_cmd, flags);
  report_cmd->add_option("--in", report_input, "Report file (.jsonl or .csv)")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (synth_cmd->parsed()) return RunSynth(flags, synth);
    if (train_cmd->parsed()) return RunTrain(flags);
    if (attack_cmd->parsed()) return RunAttack(flags);
    if (bound_cmd->parsed()) return RunBound(flags, data_path, label_column);
    if (report_cmd->parsed()) return RunReport(flags, report_input);
  } catch (const vfl::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const vfl::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const vfl::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitInvalid;
}
