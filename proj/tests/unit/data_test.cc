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
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "vfl/data/dataset.h"
#include "vfl/errors.h"
#include "vfl/metrics/metrics.h"

namespace vfl {
namespace {

Dataset ThreeRowFixture() {
  Dataset ds;
  ds.features = Matrix::FromRows({{0.125, -3.5, 1e-7}, {2.0, 0.3333333333333333, 42.0},
                                  {-1.25, 7.0, 0.1}});
  ds.labels = {0, 2, 1};
  ds.num_classes = 3;
  ds.feature_names = {"a", "b", "c"};
  return ds;
}

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("vfl_data_test_" + name);
}

TEST(CsvTest, RoundTripPreservesValues) {
  const Dataset ds = ThreeRowFixture();
  const auto path = TempPath("roundtrip.csv");
  save_csv(path, ds);
  const Dataset back = load_csv(path);
  EXPECT_EQ(back.features, ds.features);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.num_classes, 3);
  EXPECT_EQ(back.feature_names, ds.feature_names);
  std::filesystem::remove(path);
}

TEST(CsvTest, RaggedRowNamesItsLine) {
  std::stringstream in;
  in << "a,b,label\n";
  for (int i = 0; i < 5; ++i) in << "1,2,0\n";
  in << "1,0\n";  // line 7
  try {
    parse_csv(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos);
  }
}

TEST(CsvTest, NonNumericCellAndMissingLabel) {
  std::stringstream bad_cell("a,label\n1,0\nx,1\n");
  try {
    parse_csv(bad_cell);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::stringstream no_label("a,b\n1,2\n");
  EXPECT_THROW(parse_csv(no_label), ParseError);
  std::stringstream fractional_label("a,label\n1,0.5\n");
  EXPECT_THROW(parse_csv(fractional_label), ParseError);
}

TEST(CsvTest, CustomDelimiterAndLabelColumn) {
  std::stringstream in("y;f1;f2\n1;0.5;2\n0;1.5;3\n");
  CsvSchema schema;
  schema.delimiter = ';';
  schema.label_column = "y";
  const Dataset ds = parse_csv(in, schema);
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.num_features(), 2u);
  EXPECT_EQ(ds.labels, (std::vector<int>{1, 0}));
  EXPECT_DOUBLE_EQ(ds.features(1, 0), 1.5);
}

TEST(CsvTest, KnownDatasetShapesAreAsserted) {
  const auto bank = known_dataset_shape("bank");
  ASSERT_TRUE(bank.has_value());
  EXPECT_EQ(bank->samples, 45211u);
  EXPECT_EQ(bank->classes, 2);
  EXPECT_EQ(bank->features, 20u);
  EXPECT_FALSE(known_dataset_shape("other").has_value());

  const auto path = TempPath("dir") / "bank.csv";
  std::filesystem::create_directories(path.parent_path());
  save_csv(path, ThreeRowFixture());
  EXPECT_THROW(load_csv(path), InputError);
  CsvSchema lax;
  lax.check_known_shapes = false;
  EXPECT_NO_THROW(load_csv(path, lax));
  std::filesystem::remove_all(path.parent_path());
}

TEST(NormalizeTest, ColumnExamples) {
  Dataset ds;
  ds.features = Matrix::FromRows({{0, 3}, {5, 3}, {10, 3}});
  ds.labels = {0, 1, 0};
  ds.num_classes = 2;
  ds.feature_names = {"x", "k"};
  const auto [norm, stats] = minmax_normalize(ds);
  EXPECT_DOUBLE_EQ(norm.features(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(norm.features(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(norm.features(2, 0), 1.0);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_DOUBLE_EQ(norm.features(r, 1), 0.5);
  const Vector back = denormalize(norm.features.row(1), stats);
  EXPECT_NEAR(back[0], 5.0, 1e-12);
}

TEST(NormalizeTest, RoundTripAndIdempotence) {
  const Dataset ds = synth_generate({200, 6, 3, 1.0, 0.5, 4});
  const auto [norm, stats] = minmax_normalize(ds);
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const Vector back = denormalize(norm.features.row(r), stats);
    for (std::size_t j = 0; j < back.size(); ++j) {
      EXPECT_NEAR(back[j], ds.features(r, j), 1e-12);
    }
  }
  const auto again = minmax_normalize(norm).first;
  EXPECT_LE(max_abs_diff(again.features, norm.features), 1e-12);
}

TEST(SynthTest, ShapesAndLabels) {
  const Dataset ds = synth_generate({1000, 25, 10, 1.0, 0.0, 1});
  EXPECT_EQ(ds.size(), 1000u);
  EXPECT_EQ(ds.num_features(), 25u);
  EXPECT_EQ(ds.num_classes, 10);
  std::set<int> distinct(ds.labels.begin(), ds.labels.end());
  EXPECT_EQ(distinct.size(), 10u);
  EXPECT_NO_THROW(ds.validate());
}

TEST(SynthTest, LabelsBalancedWithinOne) {
  const Dataset ds = synth_generate({1003, 5, 7, 1.0, 0.2, 2});
  std::vector<int> counts(7, 0);
  for (int y : ds.labels) ++counts[y];
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  EXPECT_LE(*hi - *lo, 1);
}

TEST(SynthTest, DeterministicGivenSeed) {
  const SynthConfig cfg{300, 8, 4, 1.0, 0.6, 99};
  const Dataset a = synth_generate(cfg);
  const Dataset b = synth_generate(cfg);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  SynthConfig other = cfg;
  other.seed = 100;
  EXPECT_NE(synth_generate(other).features, a.features);
}

TEST(SynthTest, UnmixedFeaturesAreIndependentWithinClass) {
  const Dataset ds = synth_generate({10000, 6, 4, 1.0, 0.0, 5});
  for (int k = 0; k < 4; ++k) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < ds.size(); ++r) {
      if (ds.labels[r] == k) rows.push_back(r);
    }
    const Dataset cls = ds.subset(rows);
    // 2500 samples per class: the sample correlation of independent columns
    // has standard deviation 0.02, so 0.08 is a four sigma bound.
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) {
        EXPECT_LT(std::abs(pearson(cls.features.col_vector(i), cls.features.col_vector(j))),
                  0.08)
            << "class " << k << " pair " << i << "," << j;
      }
    }
  }
}

TEST(SynthTest, MixingInducesCorrelation) {
  const Dataset ds = synth_generate({5000, 10, 5, 1.0, 0.8, 5});
  double total = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = i + 1; j < 10; ++j, ++pairs) {
      total += std::abs(pearson(ds.features.col_vector(i), ds.features.col_vector(j)));
    }
  }
  EXPECT_GT(total / pairs, 0.3);
}

TEST(SynthTest, InvalidCounts) {
  EXPECT_THROW(synth_generate({10, 1, 2, 1.0, 0.0, 0}), InputError);
  EXPECT_THROW(synth_generate({1, 5, 2, 1.0, 0.0, 0}), InputError);
  EXPECT_THROW(synth_generate({10, 5, 1, 1.0, 0.0, 0}), InputError);
}

Dataset Indexed(std::size_t n) {
  Dataset ds;
  ds.features = Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) ds.features(i, 0) = static_cast<double>(i);
  ds.labels.assign(n, 0);
  ds.num_classes = 1;
  ds.feature_names = {"id"};
  return ds;
}

TEST(SplitTest, HalfAndHalf) {
  const DatasetSplit s = split_dataset(Indexed(100), {0.5, 0.0, 0.5}, 3);
  EXPECT_EQ(s.train.size(), 50u);
  EXPECT_EQ(s.test.size(), 0u);
  EXPECT_EQ(s.pred.size(), 50u);
}

TEST(SplitTest, PredictionScheduleSizes) {
  const Dataset big = Indexed(100000);
  for (const auto& [frac, want] : std::vector<std::pair<double, std::size_t>>{
           {0.1, 10000}, {0.3, 30000}, {0.5, 50000}}) {
    EXPECT_EQ(split_dataset(big, {0.5, 0.0, frac}, 1).pred.size(), want);
  }
}

TEST(SplitTest, DisjointAndDeterministic) {
  const Dataset ds = Indexed(101);
  const DatasetSplit a = split_dataset(ds, {0.4, 0.2, 0.3}, 8);
  const DatasetSplit b = split_dataset(ds, {0.4, 0.2, 0.3}, 8);
  EXPECT_EQ(a.pred.features, b.pred.features);
  std::set<double> seen;
  std::size_t total = 0;
  for (const Dataset* part : {&a.train, &a.test, &a.pred}) {
    for (std::size_t r = 0; r < part->size(); ++r) seen.insert(part->features(r, 0));
    total += part->size();
  }
  EXPECT_EQ(seen.size(), total);
  EXPECT_THROW(split_dataset(ds, {0.6, 0.3, 0.3}, 1), InputError);
}

}  // namespace
}  // namespace vfl
