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

#ifndef VFL_DATA_DATASET_H_
#define VFL_DATA_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vfl/linalg/matrix.h"

namespace vfl {

// Labelled tabular data: n samples, d features, labels in [0, num_classes).
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<std::string> feature_names;

  std::size_t size() const { return features.rows(); }
  std::size_t num_features() const { return features.cols(); }

  // Throws InputError if any invariant is broken.
  void validate() const;
  Dataset subset(std::span<const std::size_t> rows) const;
};

struct NormStats {
  Vector min;
  Vector max;
};

struct CsvSchema {
  std::string label_column = "label";
  char delimiter = ',';
  // When the file stem names one of the reference datasets (bank, credit,
  // drive, news), require its known sample/class/feature counts.
  bool check_known_shapes = true;
};

struct KnownShape {
  std::size_t samples;
  int classes;
  std::size_t features;
};
// Reference shapes for bank/credit/drive/news, nullopt for other names.
std::optional<KnownShape> known_dataset_shape(std::string_view name);

Dataset parse_csv(std::istream& in, const CsvSchema& schema = {});
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
void write_csv(std::ostream& out, const Dataset& ds, const CsvSchema& schema = {});
void save_csv(const std::filesystem::path& path, const Dataset& ds,
              const CsvSchema& schema = {});

// Per-column (x - min) / (max - min); constant columns map to 0.5.
std::pair<Dataset, NormStats> minmax_normalize(const Dataset& ds);
Vector denormalize(std::span<const double> x, const NormStats& stats);

struct SynthConfig {
  std::size_t n = 1000;
  std::size_t d = 10;
  int c = 2;
  // Larger values shrink the within-class spread (stddev 0.25 / class_sep).
  double class_sep = 1.0;
  // 0 leaves features independent given the class; 1 replaces every feature
  // by a random convex combination of all features.
  double mix_strength = 0.0;
  std::uint64_t seed = 0;
};

// Gaussian blobs around per-class centres in [0,1]^d followed by random
// linear mixing. Labels are balanced to within one sample per class.
Dataset synth_generate(const SynthConfig& cfg);

struct SplitFractions {
  double train = 0.5;
  double test = 0.0;
  double pred = 0.5;
};

struct DatasetSplit {
  Dataset train;
  Dataset test;
  Dataset pred;
};

// Shuffled disjoint partitions; each size is round-half-up(frac * n).
DatasetSplit split_dataset(const Dataset& ds, const SplitFractions& fracs,
                           std::uint64_t seed);

}  // namespace vfl

#endif  // VFL_DATA_DATASET_H_
