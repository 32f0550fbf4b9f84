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

#include "vfl/data/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vfl/errors.h"
#include "vfl/linalg/rng.h"

namespace vfl {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(Trim(line.substr(start)));
      return out;
    }
    out.push_back(Trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

bool ParseDouble(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::size_t RoundHalfUp(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

}  // namespace

void Dataset::validate() const {
  if (size() == 0) throw InputError("dataset: no samples");
  if (labels.size() != size()) {
    throw InputError("dataset: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(size()) + " samples");
  }
  if (num_classes < 1) throw InputError("dataset: num_classes must be positive");
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw InputError("dataset: label " + std::to_string(y) + " outside [0, " +
                       std::to_string(num_classes) + ")");
    }
  }
  if (feature_names.size() != num_features()) {
    throw InputError("dataset: feature_names length does not match column count");
  }
  if (!features.all_finite()) throw InputError("dataset: non-finite feature value");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = Matrix(rows.size(), num_features());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.set_row(i, features.row(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  out.num_classes = num_classes;
  out.feature_names = feature_names;
  return out;
}

std::optional<KnownShape> known_dataset_shape(std::string_view name) {
  if (name == "bank") return KnownShape{45211, 2, 20};
  if (name == "credit") return KnownShape{30000, 2, 23};
  if (name == "drive") return KnownShape{58509, 11, 48};
  if (name == "news") return KnownShape{39797, 5, 59};
  return std::nullopt;
}

Dataset parse_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("missing header row", 1);
  ++line_no;
  const auto header = SplitFields(line, schema.delimiter);
  const auto label_it = std::find(header.begin(), header.end(), schema.label_column);
  if (label_it == header.end()) {
    throw ParseError("label column '" + schema.label_column + "' not in header", 1);
  }
  const std::size_t label_col = static_cast<std::size_t>(label_it - header.begin());

  Dataset ds;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i != label_col) ds.feature_names.emplace_back(header[i]);
  }
  const std::size_t d = ds.feature_names.size();

  std::vector<double> values;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto fields = SplitFields(line, schema.delimiter);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      double v = 0.0;
      if (!ParseDouble(fields[i], v)) {
        throw ParseError("non-numeric cell '" + std::string(fields[i]) + "' in column '" +
                             std::string(header[i]) + "'",
                         line_no);
      }
      if (i == label_col) {
        if (v != std::floor(v) || v < 0.0 || v > 1e9) {
          throw ParseError("label '" + std::string(fields[i]) +
                               "' is not a non-negative integer",
                           line_no);
        }
        ds.labels.push_back(static_cast<int>(v));
        max_label = std::max(max_label, static_cast<int>(v));
      } else {
        values.push_back(v);
      }
    }
  }
  if (ds.labels.empty()) throw ParseError("no data rows", line_no);

  ds.features = Matrix(ds.labels.size(), d);
  std::copy(values.begin(), values.end(), ds.features.data().begin());
  ds.num_classes = max_label + 1;
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  Dataset ds = parse_csv(in, schema);
  if (schema.check_known_shapes) {
    if (auto shape = known_dataset_shape(path.stem().string())) {
      if (ds.size() != shape->samples || ds.num_classes != shape->classes ||
          ds.num_features() != shape->features) {
        throw InputError(path.string() + ": expected " + std::to_string(shape->samples) +
                         " samples / " + std::to_string(shape->classes) + " classes / " +
                         std::to_string(shape->features) + " features, got " +
                         std::to_string(ds.size()) + " / " +
                         std::to_string(ds.num_classes) + " / " +
                         std::to_string(ds.num_features()));
      }
    }
  }
  return ds;
}

void write_csv(std::ostream& out, const Dataset& ds, const CsvSchema& schema) {
  for (const auto& name : ds.feature_names) out << name << schema.delimiter;
  out << schema.label_column << '\n';
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (double v : ds.features.row(r)) out << FormatDouble(v) << schema.delimiter;
    out << ds.labels[r] << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& ds,
              const CsvSchema& schema) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_csv(out, ds, schema);
  if (!out) throw InputError("write failed for " + path.string());
}

std::pair<Dataset, NormStats> minmax_normalize(const Dataset& ds) {
  const std::size_t d = ds.num_features();
  NormStats stats{Vector(d, 0.0), Vector(d, 0.0)};
  if (ds.size() > 0) {
    stats.min = ds.features.row_vector(0);
    stats.max = stats.min;
  }
  for (std::size_t r = 1; r < ds.size(); ++r) {
    auto row = ds.features.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      stats.min[j] = std::min(stats.min[j], row[j]);
      stats.max[j] = std::max(stats.max[j], row[j]);
    }
  }
  Dataset out = ds;
  for (std::size_t r = 0; r < out.size(); ++r) {
    auto row = out.features.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      const double span = stats.max[j] - stats.min[j];
      row[j] = span > 0.0 ? (row[j] - stats.min[j]) / span : 0.5;
    }
  }
  return {std::move(out), std::move(stats)};
}

Vector denormalize(std::span<const double> x, const NormStats& stats) {
  if (x.size() != stats.min.size()) {
    throw ShapeError("denormalize: vector length " + std::to_string(x.size()) +
                     " vs " + std::to_string(stats.min.size()) + " features");
  }
  Vector out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double span = stats.max[j] - stats.min[j];
    out[j] = span > 0.0 ? stats.min[j] + x[j] * span : stats.min[j];
  }
  return out;
}

Dataset synth_generate(const SynthConfig& cfg) {
  if (cfg.c < 2) throw InputError("synth: need at least 2 classes");
  if (cfg.d < 2) throw InputError("synth: need at least 2 features");
  if (cfg.n < static_cast<std::size_t>(cfg.c)) {
    throw InputError("synth: n must be at least the number of classes");
  }
  if (!(cfg.class_sep > 0.0)) throw InputError("synth: class_sep must be positive");
  if (!(cfg.mix_strength >= 0.0 && cfg.mix_strength <= 1.0)) {
    throw InputError("synth: mix_strength must lie in [0, 1]");
  }

  Rng root(cfg.seed);
  Rng center_rng = root.fork("centers");
  Rng label_rng = root.fork("labels");
  Rng noise_rng = root.fork("noise");
  Rng mix_rng = root.fork("mixing");

  const std::size_t d = cfg.d;
  Matrix centers(static_cast<std::size_t>(cfg.c), d);
  for (double& v : centers.data()) v = center_rng.uniform();

  Dataset ds;
  ds.num_classes = cfg.c;
  ds.labels.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    ds.labels[i] = static_cast<int>(i % static_cast<std::size_t>(cfg.c));
  }
  label_rng.shuffle(ds.labels);

  const double spread = 0.25 / cfg.class_sep;
  Matrix raw(cfg.n, d);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    auto center = centers.row(static_cast<std::size_t>(ds.labels[i]));
    auto row = raw.row(i);
    for (std::size_t j = 0; j < d; ++j) row[j] = center[j] + spread * noise_rng.normal();
  }

  // Column-stochastic mixing matrix: output j is a convex combination of inputs.
  Matrix mix(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    double total = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      mix(k, j) = mix_rng.uniform();
      total += mix(k, j);
    }
    for (std::size_t k = 0; k < d; ++k) mix(k, j) /= total;
  }
  const double m = cfg.mix_strength;
  if (m > 0.0) {
    const Matrix mixed = matmul(raw, mix);
    for (std::size_t i = 0; i < cfg.n; ++i) {
      auto dst = raw.row(i);
      auto src = mixed.row(i);
      for (std::size_t j = 0; j < d; ++j) dst[j] = (1.0 - m) * dst[j] + m * src[j];
    }
  }
  ds.features = std::move(raw);
  for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  return ds;
}

DatasetSplit split_dataset(const Dataset& ds, const SplitFractions& fracs,
                           std::uint64_t seed) {
  for (double f : {fracs.train, fracs.test, fracs.pred}) {
    if (!(f >= 0.0 && f <= 1.0)) throw InputError("split: fractions must lie in [0, 1]");
  }
  if (fracs.train + fracs.test + fracs.pred > 1.0 + 1e-12) {
    throw InputError("split: fractions sum to more than 1");
  }
  const std::size_t n = ds.size();
  const std::size_t n_train = std::min(n, RoundHalfUp(fracs.train * n));
  const std::size_t n_test = std::min(n - n_train, RoundHalfUp(fracs.test * n));
  const std::size_t n_pred = std::min(n - n_train - n_test, RoundHalfUp(fracs.pred * n));

  Rng rng(seed);
  const auto order = rng.permutation(n);
  std::span<const std::size_t> all(order);
  return DatasetSplit{ds.subset(all.subspan(0, n_train)),
                      ds.subset(all.subspan(n_train, n_test)),
                      ds.subset(all.subspan(n_train + n_test, n_pred))};
}

}  // namespace vfl
