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


#include "vfl/harness/report.h"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "vfl/errors.h"

namespace vfl {
namespace {

using ordered_json = nlohmann::ordered_json;

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T ParseNumber(std::string_view text, std::size_t line, std::string_view field) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError("field " + std::string(field) + ": bad number '" + std::string(text) + "'",
                     line);
  }
  return value;
}

std::string CsvQuote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> CsvSplit(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  return cells;
}

ordered_json OptionalJson(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json RecordToJson(const ReportRecord& r) {
  return ordered_json{{"dataset", r.dataset},
                      {"model", r.model},
                      {"attack", r.attack},
                      {"defense", r.defense},
                      {"d_target_frac", r.d_target_frac},
                      {"d_target", r.d_target},
                      {"trial", r.trial},
                      {"seed", r.seed},
                      {"n_pred", r.n_pred},
                      {"mse", r.mse},
                      {"cbr", OptionalJson(r.cbr)},
                      {"upper_bound", OptionalJson(r.upper_bound)},
                      {"infeasible", r.infeasible},
                      {"runtime_ms", r.runtime_ms}};
}

std::vector<std::string> RecordToCells(const ReportRecord& r) {
  auto opt = [](const std::optional<double>& v) { return v ? FormatDouble(*v) : std::string(); };
  return {CsvQuote(r.dataset),
          CsvQuote(r.model),
          CsvQuote(r.attack),
          CsvQuote(r.defense),
          FormatDouble(r.d_target_frac),
          std::to_string(r.d_target),
          std::to_string(r.trial),
          std::to_string(r.seed),
          std::to_string(r.n_pred),
          FormatDouble(r.mse),
          opt(r.cbr),
          opt(r.upper_bound),
          std::to_string(r.infeasible),
          FormatDouble(r.runtime_ms)};
}

std::optional<double> OptionalFromJson(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

ReportRecord RecordFromJson(const ordered_json& j) {
  ReportRecord r;
  r.dataset = j.at("dataset").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.attack = j.at("attack").get<std::string>();
  r.defense = j.at("defense").get<std::string>();
  r.d_target_frac = j.at("d_target_frac").get<double>();
  r.d_target = j.at("d_target").get<std::size_t>();
  r.trial = j.at("trial").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.n_pred = j.at("n_pred").get<std::size_t>();
  r.mse = j.at("mse").get<double>();
  r.cbr = OptionalFromJson(j, "cbr");
  r.upper_bound = OptionalFromJson(j, "upper_bound");
  r.infeasible = j.at("infeasible").get<std::size_t>();
  r.runtime_ms = j.at("runtime_ms").get<double>();
  return r;
}

ReportRecord RecordFromCells(const std::vector<std::string>& c, std::size_t line) {
  const auto& f = report_fields();
  if (c.size() != f.size()) {
    throw ParseError("expected " + std::to_string(f.size()) + " fields, got " +
                     std::to_string(c.size()),
                     line);
  }
  auto opt = [&](std::size_t i) -> std::optional<double> {
    if (c[i].empty()) return std::nullopt;
    return ParseNumber<double>(c[i], line, f[i]);
  };
  ReportRecord r;
  r.dataset = c[0];
  r.model = c[1];
  r.attack = c[2];
  r.defense = c[3];
  r.d_target_frac = ParseNumber<double>(c[4], line, f[4]);
  r.d_target = ParseNumber<std::size_t>(c[5], line, f[5]);
  r.trial = ParseNumber<int>(c[6], line, f[6]);
  r.seed = ParseNumber<std::uint64_t>(c[7], line, f[7]);
  r.n_pred = ParseNumber<std::size_t>(c[8], line, f[8]);
  r.mse = ParseNumber<double>(c[9], line, f[9]);
  r.cbr = opt(10);
  r.upper_bound = opt(11);
  r.infeasible = ParseNumber<std::size_t>(c[12], line, f[12]);
  r.runtime_ms = ParseNumber<double>(c[13], line, f[13]);
  return r;
}

void WriteCsvLine(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out << ',';
    out << cells[i];
  }
  out << '\n';
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "jsonl") return ReportFormat::kJsonl;
  if (name == "csv") return ReportFormat::kCsv;
  throw InputError("unknown report format '" + std::string(name) + "' (expected jsonl|csv)");
}

const std::vector<std::string>& report_fields() {
  static const std::vector<std::string> kFields = {
      "dataset", "model", "attack", "defense",     "d_target_frac", "d_target",   "trial",
      "seed",    "n_pred", "mse",   "cbr",         "upper_bound",   "infeasible", "runtime_ms"};
  return kFields;
}

void write_report(std::ostream& out, std::span<const ReportRecord> records,
                  ReportFormat format) {
  if (format == ReportFormat::kJsonl) {
    for (const auto& r : records) out << RecordToJson(r).dump() << '\n';
    return;
  }
  WriteCsvLine(out, report_fields());
  for (const auto& r : records) WriteCsvLine(out, RecordToCells(r));
}

std::string format_report(std::span<const ReportRecord> records, ReportFormat format) {
  std::ostringstream out;
  write_report(out, records, format);
  return out.str();
}

void emit_report(std::span<const ReportRecord> records, const std::filesystem::path& path,
                 ReportFormat format) {
  if (records.empty()) throw InputError("emit_report: no records");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("emit_report: cannot write " + path.string());
  write_report(out, records, format);
  if (!out) throw InputError("emit_report: write failed for " + path.string());
}

std::vector<ReportRecord> parse_report(std::istream& in, ReportFormat format) {
  std::vector<ReportRecord> out;
  std::string line;
  std::size_t line_no = 0;
  if (format == ReportFormat::kCsv) {
    if (!std::getline(in, line)) return out;
    ++line_no;
    if (CsvSplit(line, line_no) != report_fields()) {
      throw ParseError("unexpected report header", line_no);
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (format == ReportFormat::kCsv) {
      out.push_back(RecordFromCells(CsvSplit(line, line_no), line_no));
      continue;
    }
    try {
      out.push_back(RecordFromJson(ordered_json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

std::vector<ReportRecord> load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open report " + path.string());
  const ReportFormat format =
      path.extension() == ".csv" ? ReportFormat::kCsv : ReportFormat::kJsonl;
  return parse_report(in, format);
}

std::vector<AggregateRow> aggregate_mean(std::span<const ReportRecord> records) {
  using Key = std::tuple<std::string, std::string, std::string, std::string, double>;
  std::map<Key, std::size_t> index;
  std::vector<AggregateRow> rows;
  std::vector<std::size_t> cbr_n;
  std::vector<std::size_t> bound_n;
  for (const auto& r : records) {
    const Key key{r.dataset, r.model, r.attack, r.defense, r.d_target_frac};
    auto [it, inserted] = index.try_emplace(key, rows.size());
    if (inserted) {
      AggregateRow row;
      row.dataset = r.dataset;
      row.model = r.model;
      row.attack = r.attack;
      row.defense = r.defense;
      row.d_target_frac = r.d_target_frac;
      rows.push_back(std::move(row));
      cbr_n.push_back(0);
      bound_n.push_back(0);
    }
    AggregateRow& row = rows[it->second];
    ++row.trials;
    row.mse += r.mse;
    row.infeasible += r.infeasible;
    if (r.cbr) {
      row.cbr = row.cbr.value_or(0.0) + *r.cbr;
      ++cbr_n[it->second];
    }
    if (r.upper_bound) {
      row.upper_bound = row.upper_bound.value_or(0.0) + *r.upper_bound;
      ++bound_n[it->second];
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].mse /= static_cast<double>(rows[i].trials);
    if (rows[i].cbr) *rows[i].cbr /= static_cast<double>(cbr_n[i]);
    if (rows[i].upper_bound) *rows[i].upper_bound /= static_cast<double>(bound_n[i]);
  }
  return rows;
}

void write_aggregate(std::ostream& out, std::span<const AggregateRow> rows, ReportFormat format) {
  if (format == ReportFormat::kJsonl) {
    for (const auto& r : rows) {
      out << ordered_json{{"dataset", r.dataset},
                          {"model", r.model},
                          {"attack", r.attack},
                          {"defense", r.defense},
                          {"d_target_frac", r.d_target_frac},
                          {"trials", r.trials},
                          {"mse", r.mse},
                          {"cbr", OptionalJson(r.cbr)},
                          {"upper_bound", OptionalJson(r.upper_bound)},
                          {"infeasible", r.infeasible}}
                 .dump()
          << '\n';
    }
    return;
  }
  WriteCsvLine(out, {"dataset", "model", "attack", "defense", "d_target_frac", "trials", "mse",
                     "cbr", "upper_bound", "infeasible"});
  auto opt = [](const std::optional<double>& v) { return v ? FormatDouble(*v) : std::string(); };
  for (const auto& r : rows) {
    WriteCsvLine(out, {CsvQuote(r.dataset), CsvQuote(r.model), CsvQuote(r.attack),
                       CsvQuote(r.defense), FormatDouble(r.d_target_frac),
                       std::to_string(r.trials), FormatDouble(r.mse), opt(r.cbr),
                       opt(r.upper_bound), std::to_string(r.infeasible)});
  }
}

}  // namespace vfl
