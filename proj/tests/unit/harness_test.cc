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
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "oracles.h"
#include "vfl/errors.h"
#include "vfl/linalg/activations.h"
#include "vfl/harness/config.h"
#include "vfl/harness/experiment.h"
#include "vfl/harness/report.h"
#include "vfl/models/model.h"

namespace vfl {
namespace {

const std::filesystem::path kGoldenDir = VFL_GOLDEN_DIR;

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t CountLines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// -------------------------------------------------------------- rounding

TEST(RoundingTest, TruncatesTowardZero) {
  EXPECT_DOUBLE_EQ(apply_rounding(Vector{0.867}, 1)[0], 0.8);
  EXPECT_DOUBLE_EQ(apply_rounding(Vector{0.049}, 3)[0], 0.049);
  EXPECT_DOUBLE_EQ(apply_rounding(Vector{0.9999}, 2)[0], 0.99);
  EXPECT_DOUBLE_EQ(apply_rounding(Vector{1.0}, 2)[0], 1.0);
  EXPECT_THROW(apply_rounding(Vector{0.5}, 0), InputError);
}

TEST(RoundingTest, NeverIncreasesAndStaysWithinOneUnit) {
  Rng rng(1);
  for (int digits = 1; digits <= 6; ++digits) {
    const double unit = std::pow(10.0, -digits);
    for (int i = 0; i < 2000; ++i) {
      const Vector v = softmax(testing::RandomVector(4, rng, -5.0, 5.0));
      const Vector r = apply_rounding(v, digits);
      double total = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) {
        EXPECT_LE(r[k], v[k]);
        EXPECT_LT(v[k] - r[k], unit);
        EXPECT_GE(r[k], 0.0);
        total += r[k];
      }
      EXPECT_LE(total, 1.0 + 1e-12);
    }
  }
}

// ---------------------------------------------------------------- config

TEST(ConfigTest, ReportsEveryProblemAtOnce) {
  const std::string text = R"({
    "trials": 0,
    "fractions": [0.5, 1.5],
    "defense": {"rounding_digits": 0},
    "colour": "blue",
    "model": {"kind": "logreg", "logreg": {"epochs": "many"}}
  })";
  try {
    parse_config(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_GE(e.problems().size(), 5u) << e.what();
    const std::string what = e.what();
    EXPECT_NE(what.find("colour"), std::string::npos);
    EXPECT_NE(what.find("epochs"), std::string::npos);
    EXPECT_NE(what.find("trials"), std::string::npos);
  }
}

TEST(ConfigTest, RejectsMalformedJson) {
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config(R"({"attack": {"kind": "magic"}})"), ConfigError);
}

TEST(ConfigTest, JsonRoundTrip) {
  ExperimentConfig cfg;
  cfg.dataset.synth = {300, 6, 3, 1.5, 0.4, 5};
  cfg.model.kind = ModelKind::kMlp;
  cfg.model.mlp.hidden = {16, 8};
  cfg.attack.kind = AttackKind::kGrna;
  cfg.attack.grn.use_noise = false;
  cfg.defense.rounding_digits = 3;
  cfg.fractions = {0.25};
  cfg.trials = 2;
  cfg.seed = 99;
  const std::string text = config_to_json(cfg);
  EXPECT_EQ(config_to_json(parse_config(text)), text);
}

TEST(ConfigTest, ShippedConfigsParse) {
  for (const auto& entry :
       std::filesystem::directory_iterator(kGoldenDir.parent_path().parent_path() / "configs")) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
  }
}

// ---------------------------------------------------------------- report

std::vector<ReportRecord> FixtureRecords() {
  ReportRecord a;
  a.dataset = "synthetic";
  a.model = "logreg";
  a.attack = "esa";
  a.defense = "none";
  a.d_target_frac = 0.2;
  a.d_target = 2;
  a.trial = 0;
  a.seed = 12345678901234567890ull;
  a.n_pred = 250;
  a.mse = 1.25e-31;
  a.upper_bound = 0.6666666666666666;
  ReportRecord b = a;
  b.attack = "uniform";
  b.mse = 0.1671;
  ReportRecord c = a;
  c.model = "tree";
  c.attack = "pra";
  c.defense = "round3";
  c.trial = 1;
  c.mse = 0.0831;
  c.cbr = 0.75;
  c.upper_bound.reset();
  c.infeasible = 3;
  c.runtime_ms = 12.5;
  c.dataset = "with,comma \"quoted\"";
  return {a, b, c};
}

TEST(ReportTest, LineCounts) {
  const auto records = FixtureRecords();
  EXPECT_EQ(CountLines(format_report(records, ReportFormat::kJsonl)), 3u);
  EXPECT_EQ(CountLines(format_report(records, ReportFormat::kCsv)), 4u);
}

TEST(ReportTest, RoundTripsBothFormats) {
  const auto records = FixtureRecords();
  for (ReportFormat format : {ReportFormat::kJsonl, ReportFormat::kCsv}) {
    std::stringstream buf(format_report(records, format));
    EXPECT_EQ(parse_report(buf, format), records);
  }
}

TEST(ReportTest, MatchesGoldenFixtures) {
  const auto records = FixtureRecords();
  EXPECT_EQ(format_report(records, ReportFormat::kJsonl),
            ReadFile(kGoldenDir / "report.jsonl"));
  EXPECT_EQ(format_report(records, ReportFormat::kCsv), ReadFile(kGoldenDir / "report.csv"));
  EXPECT_EQ(load_report(kGoldenDir / "report.jsonl"), records);
  EXPECT_EQ(load_report(kGoldenDir / "report.csv"), records);
}

TEST(ReportTest, JsonlFieldOrderIsStable) {
  const auto records = FixtureRecords();
  std::stringstream buf(format_report(records, ReportFormat::kJsonl));
  std::string line;
  std::getline(buf, line);
  const auto j = nlohmann::ordered_json::parse(line);
  std::vector<std::string> keys;
  for (const auto& [key, value] : j.items()) keys.push_back(key);
  EXPECT_EQ(keys, report_fields());
}

TEST(ReportTest, ParseErrorsNameTheLine) {
  std::stringstream jsonl(format_report(FixtureRecords(), ReportFormat::kJsonl) + "{oops\n");
  try {
    parse_report(jsonl, ReportFormat::kJsonl);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  std::stringstream csv(format_report(FixtureRecords(), ReportFormat::kCsv) + "a,b\n");
  try {
    parse_report(csv, ReportFormat::kCsv);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
}

TEST(ReportTest, EmitRejectsEmptyAndUnwritable) {
  EXPECT_THROW(emit_report({}, std::filesystem::temp_directory_path() / "vfl_empty.jsonl",
                           ReportFormat::kJsonl),
               InputError);
  EXPECT_THROW(emit_report(FixtureRecords(), "/nonexistent-dir/x/report.csv",
                           ReportFormat::kCsv),
               InputError);
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::kCsv);
  EXPECT_THROW(parse_report_format("xml"), InputError);
}

TEST(ReportTest, AggregateMatchesHandAverage) {
  std::vector<ReportRecord> records;
  double sum = 0.0;
  double cbr_sum = 0.0;
  int with_cbr = 0;
  for (int t = 0; t < 10; ++t) {
    ReportRecord r = FixtureRecords()[0];
    r.trial = t;
    r.mse = 0.01 * (t + 1) * (t + 1);
    sum += r.mse;
    if (t % 2 == 0) {
      r.cbr = 0.1 * t;
      cbr_sum += 0.1 * t;
      ++with_cbr;
    }
    records.push_back(r);
    ReportRecord other = r;
    other.attack = "gaussian";
    records.push_back(other);
  }
  const auto rows = aggregate_mean(records);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].attack, "esa");
  EXPECT_EQ(rows[0].trials, 10u);
  EXPECT_NEAR(rows[0].mse, sum / 10.0, 1e-15);
  ASSERT_TRUE(rows[0].cbr.has_value());
  EXPECT_NEAR(*rows[0].cbr, cbr_sum / with_cbr, 1e-15);
}

// ------------------------------------------------------------ experiment

ExperimentConfig DeskEsaConfig() {
  ExperimentConfig cfg;
  cfg.dataset.synth = {500, 10, 5, 1.0, 0.0, 7};
  cfg.model.kind = ModelKind::kLogReg;
  cfg.attack.kind = AttackKind::kEsa;
  cfg.fractions = {0.2};
  cfg.trials = 1;
  cfg.seed = 42;
  return cfg;
}

TEST(ExperimentTest, EsaIsExactAtDeskScale) {
  const auto records = run_experiment(DeskEsaConfig());
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].attack, "esa");
  EXPECT_EQ(records[0].d_target, 2u);
  EXPECT_LT(records[0].mse, 1e-8);
  EXPECT_EQ(records[1].attack, "uniform");
  EXPECT_EQ(records[2].attack, "gaussian");
  for (const auto& r : records) {
    ASSERT_TRUE(r.upper_bound.has_value());
    EXPECT_LE(records[0].mse, *r.upper_bound);
  }
}

TEST(ExperimentTest, ReportsAreByteIdenticalAcrossRunsAndThreads) {
  ExperimentConfig cfg = DeskEsaConfig();
  cfg.fractions = {0.2, 0.5};
  cfg.trials = 3;
  const std::string first = format_report(run_experiment(cfg), ReportFormat::kJsonl);
  EXPECT_EQ(format_report(run_experiment(cfg), ReportFormat::kJsonl), first);
  EXPECT_EQ(format_report(run_experiment(cfg, {4}), ReportFormat::kJsonl), first);
}

TEST(ExperimentTest, TrialsAreSeedIsolated) {
  ExperimentConfig cfg = DeskEsaConfig();
  cfg.trials = 2;
  const auto two = run_experiment(cfg);
  cfg.trials = 3;
  const auto three = run_experiment(cfg);
  ASSERT_EQ(three.size(), 9u);
  for (std::size_t i = 0; i < two.size(); ++i) EXPECT_EQ(two[i], three[i]);
  EXPECT_NE(trial_seed(42, 0, 0), trial_seed(42, 0, 1));
  EXPECT_NE(trial_seed(42, 0, 0), trial_seed(42, 1, 0));
  EXPECT_EQ(run_trial(cfg, load_experiment_data(cfg.dataset), 0, 2),
            std::vector<ReportRecord>(three.begin() + 6, three.end()));
}

TEST(ExperimentTest, GrnaRecordsComeWithBothBaselines) {
  ExperimentConfig cfg;
  cfg.dataset.synth = {300, 6, 3, 1.0, 0.5, 3};
  cfg.model.kind = ModelKind::kMlp;
  cfg.model.mlp.hidden = {8};
  cfg.model.mlp.epochs = 2;
  cfg.attack.kind = AttackKind::kGrna;
  cfg.attack.grn.hidden = {8};
  cfg.attack.grn.epochs = 2;
  cfg.fractions = {0.5};
  cfg.trials = 2;
  const auto records = run_experiment(cfg);
  ASSERT_EQ(records.size(), 6u);
  for (std::size_t i = 0; i < records.size(); i += 3) {
    EXPECT_EQ(records[i].attack, "grna");
    EXPECT_EQ(records[i + 1].attack, "uniform");
    EXPECT_EQ(records[i + 2].attack, "gaussian");
    EXPECT_EQ(records[i + 1].trial, records[i].trial);
    EXPECT_EQ(records[i + 2].seed, records[i].seed);
  }
}

TEST(ExperimentTest, PraOnTreeRecordsCbr) {
  ExperimentConfig cfg;
  cfg.dataset.synth = {400, 6, 2, 1.0, 0.3, 4};
  cfg.model.kind = ModelKind::kTree;
  cfg.model.tree.max_depth = 4;
  cfg.attack.kind = AttackKind::kPra;
  cfg.fractions = {0.5};
  cfg.trials = 1;
  const auto records = run_experiment(cfg);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].attack, "pra");
  for (const auto& r : records) {
    ASSERT_TRUE(r.cbr.has_value()) << r.attack;
    EXPECT_GE(*r.cbr, 0.0);
    EXPECT_LE(*r.cbr, 1.0);
  }
}

TEST(ExperimentTest, FrozenModelIsSharedAcrossTrials) {
  ExperimentConfig cfg = DeskEsaConfig();
  cfg.freeze_model = true;
  cfg.trials = 2;
  const auto records = run_experiment(cfg);
  ASSERT_EQ(records.size(), 6u);
  // Same split for every trial, so the prediction set size is shared.
  EXPECT_EQ(records[0].n_pred, records[3].n_pred);
  EXPECT_LT(records[0].mse, 1e-8);
}

TEST(ExperimentTest, InvalidConfigRaisesConfigError) {
  ExperimentConfig cfg = DeskEsaConfig();
  cfg.trials = 0;
  cfg.fractions = {};
  EXPECT_THROW(run_experiment(cfg), ConfigError);
}

TEST(ExperimentTest, DefenseLabels) {
  DefenseSpec d;
  EXPECT_EQ(defense_label(d), "none");
  d.rounding_digits = 3;
  EXPECT_EQ(defense_label(d), "round3");
}

TEST(ModelGoldenTest, LogRegJsonMatchesFixture) {
  std::string want = ReadFile(kGoldenDir / "model_logreg.json");
  while (!want.empty() && want.back() == '\n') want.pop_back();
  EXPECT_EQ(model_to_json(testing::ThreeClassExampleModel()), want);
  const TrainedModel back = load_model(kGoldenDir / "model_logreg.json");
  EXPECT_EQ(std::get<LogRegModel>(back).weights, testing::ThreeClassExampleModel().weights);
}

}  // namespace
}  // namespace vfl
