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

#include <gtest/gtest.h>

#include "oracles.h"
#include "vfl/errors.h"
#include "vfl/partition/partition.h"

namespace vfl {
namespace {

TEST(PartitionTest, SplitWorkedExample) {
  const auto p = VerticalPartition::FromAdversaryIndices(4, {0, 1});
  const auto [adv, target] = p.split(Vector{25, 2000, 8000, 3});
  EXPECT_EQ(adv, (Vector{25, 2000}));
  EXPECT_EQ(target, (Vector{8000, 3}));
  EXPECT_EQ(p.assemble(Vector{25, 2000}, Vector{8000, 3}), (Vector{25, 2000, 8000, 3}));
}

TEST(PartitionTest, EmptyTargetSide) {
  const auto p = VerticalPartition::FromTargetIndices(3, {});
  const auto [adv, target] = p.split(Vector{1, 2, 3});
  EXPECT_EQ(adv, (Vector{1, 2, 3}));
  EXPECT_TRUE(target.empty());
}

TEST(PartitionTest, InterleavedAssemble) {
  const auto p = VerticalPartition::FromAdversaryIndices(4, {0, 2});
  EXPECT_EQ(p.assemble(Vector{1, 3}, Vector{2, 4}), (Vector{1, 2, 3, 4}));
}

TEST(PartitionTest, RejectsBadIndicesAndShapes) {
  EXPECT_THROW(VerticalPartition::FromTargetIndices(3, {0, 0}), InputError);
  EXPECT_THROW(VerticalPartition::FromTargetIndices(3, {3}), InputError);
  const auto p = VerticalPartition::FromTargetIndices(3, {1});
  EXPECT_THROW(p.split(Vector{1, 2}), ShapeError);
  EXPECT_THROW(p.assemble(Vector{1}, Vector{2}), ShapeError);
}

TEST(PartitionTest, RandomRoundTripsAndDisjointness) {
  Rng rng(21);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t d = 2 + rng.uniform_int(30);
    const double frac = rng.uniform(0.05, 0.95);
    const std::size_t want = static_cast<std::size_t>(std::floor(frac * d + 0.5));
    if (want == 0 || want >= d) {
      EXPECT_THROW(sample_partition(d, frac, rng), InputError);
      continue;
    }
    const VerticalPartition p = sample_partition(d, frac, rng);
    EXPECT_EQ(p.num_target(), want);
    EXPECT_EQ(p.num_adv() + p.num_target(), d);
    std::vector<std::size_t> all = p.adv_indices();
    all.insert(all.end(), p.target_indices().begin(), p.target_indices().end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < d; ++i) EXPECT_EQ(all[i], i);
    EXPECT_TRUE(std::is_sorted(p.adv_indices().begin(), p.adv_indices().end()));
    EXPECT_TRUE(std::is_sorted(p.target_indices().begin(), p.target_indices().end()));

    const Vector x = testing::RandomVector(d, rng);
    const auto [adv, target] = p.split(x);
    EXPECT_EQ(p.assemble(adv, target), x);

    const Matrix m = testing::RandomMatrix(4, d, rng);
    const auto [ma, mt] = p.split_rows(m);
    EXPECT_EQ(p.assemble_rows(ma, mt), m);
  }
}

TEST(SamplePartitionTest, FractionExamples) {
  Rng rng(1);
  EXPECT_EQ(sample_partition(20, 0.1, rng).num_target(), 2u);
  EXPECT_EQ(sample_partition(10, 0.5, rng).num_target(), 5u);
  EXPECT_EQ(sample_partition(10, 0.25, rng).num_target(), 3u);  // round half up
  EXPECT_THROW(sample_partition(10, 0.01, rng), InputError);
  EXPECT_THROW(sample_partition(10, 0.99, rng), InputError);
}

TEST(SamplePartitionTest, DeterministicGivenSeed) {
  Rng a(5);
  Rng b(5);
  EXPECT_EQ(sample_partition(30, 0.4, a), sample_partition(30, 0.4, b));
}

}  // namespace
}  // namespace vfl
