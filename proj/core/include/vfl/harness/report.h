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


#ifndef VFL_HARNESS_REPORT_H_
#define VFL_HARNESS_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vfl {

// One row of an experiment report: a single attack (or baseline) evaluated
// for one (d_target fraction, trial) pair.
struct ReportRecord {
  std::string dataset;
  std::string model;
  std::string attack;
  std::string defense;
  double d_target_frac = 0.0;
  std::size_t d_target = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::size_t n_pred = 0;
  double mse = 0.0;
  std::optional<double> cbr;
  std::optional<double> upper_bound;
  // Samples for which the attack had no feasible answer.
  std::size_t infeasible = 0;
  double runtime_ms = 0.0;

  friend bool operator==(const ReportRecord&, const ReportRecord&) = default;
};

enum class ReportFormat { kJsonl, kCsv };
ReportFormat parse_report_format(std::string_view name);

// Column order used by both formats.
const std::vector<std::string>& report_fields();

void write_report(std::ostream& out, std::span<const ReportRecord> records, ReportFormat format);
std::string format_report(std::span<const ReportRecord> records, ReportFormat format);
// Throws InputError for an empty record list or an unwritable path.
void emit_report(std::span<const ReportRecord> records, const std::filesystem::path& path,
                 ReportFormat format);

// Inverse of write_report; throws ParseError with a line number.
std::vector<ReportRecord> parse_report(std::istream& in, ReportFormat format);
std::vector<ReportRecord> load_report(const std::filesystem::path& path);

// Mean over trials of every (dataset, model, attack, defense, fraction) group,
// in first-appearance order. cbr / upper_bound average the trials that have one.
struct AggregateRow {
  std::string dataset;
  std::string model;
  std::string attack;
  std::string defense;
  double d_target_frac = 0.0;
  std::size_t trials = 0;
  double mse = 0.0;
  std::optional<double> cbr;
  std::optional<double> upper_bound;
  std::size_t infeasible = 0;
};

std::vector<AggregateRow> aggregate_mean(std::span<const ReportRecord> records);
void write_aggregate(std::ostream& out, std::span<const AggregateRow> rows, ReportFormat format);

}  // namespace vfl

#endif  // VFL_HARNESS_REPORT_H_
