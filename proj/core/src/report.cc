/* Copyright 2026 The oodkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "oodkit/report.h"

#include <cstdio>
#include <functional>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>
#include "oodkit/error.h"

namespace oodkit {
namespace {

using nlohmann::json;

// U+2014, marks a failed cell.
constexpr char kDash[] = "\u2014";

json Optional(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json SummaryToJson(const std::optional<MetricSummary>& s) {
  if (!s) return nullptr;
  return {{"count", s->count}, {"mean", s->mean}, {"stddev", s->stddev}};
}

json ToJson(const RunResult& r) {
  return {{"split", r.split},
          {"seed", r.seed},
          {"failure", r.failure},
          {"id_accuracy", Optional(r.id_accuracy)},
          {"covariate_accuracy", Optional(r.covariate_accuracy)},
          {"covariate_accuracy_by_dump", r.covariate_accuracy_by_dump},
          {"de_id_accuracy", Optional(r.de_id_accuracy)},
          {"de_covariate_accuracy", Optional(r.de_covariate_accuracy)},
          {"num_id_train", r.num_id_train},
          {"num_id_test", r.num_id_test},
          {"num_semantic_ood", r.num_semantic_ood},
          {"num_covariate", r.num_covariate}};
}

json ToJson(const CellResult& c) {
  return {{"split", c.split},
          {"seed", c.seed},
          {"detector", c.detector},
          {"failure", c.failure},
          {"auroc", Optional(c.auroc)},
          {"prr", Optional(c.prr)},
          {"prr_tie_randomized", Optional(c.prr_tie_randomized)},
          {"prr_by_dump", c.prr_by_dump},
          {"num_id_test", c.num_id_test},
          {"num_semantic_ood", c.num_semantic_ood},
          {"num_covariate", c.num_covariate},
          {"warnings", c.warnings}};
}

std::string ToJsonText(const EvalReport& report) {
  json doc;
  doc["detectors"] = report.detectors;
  doc["runs"] = json::array();
  for (const auto& r : report.runs) doc["runs"].push_back(ToJson(r));
  doc["cells"] = json::array();
  for (const auto& c : report.cells) doc["cells"].push_back(ToJson(c));
  doc["id_accuracy"] = SummaryToJson(report.id_accuracy);
  doc["covariate_accuracy"] = SummaryToJson(report.covariate_accuracy);
  doc["de_id_accuracy"] = SummaryToJson(report.de_id_accuracy);
  doc["de_covariate_accuracy"] = SummaryToJson(report.de_covariate_accuracy);
  doc["aggregates"] = json::array();
  for (const auto& a : report.aggregates) {
    doc["aggregates"].push_back({{"detector", a.detector},
                                 {"auroc", SummaryToJson(a.auroc)},
                                 {"prr", SummaryToJson(a.prr)},
                                 {"failed_cells", a.failed_cells}});
  }
  return doc.dump(2) + "\n";
}

std::optional<double> OptionalFrom(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

std::optional<MetricSummary> SummaryFrom(const json& v) {
  if (v.is_null()) return std::nullopt;
  MetricSummary s;
  s.count = v.at("count").get<std::size_t>();
  s.mean = v.at("mean").get<double>();
  s.stddev = v.at("stddev").get<double>();
  return s;
}

std::string Fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string FormatSummary(const std::optional<MetricSummary>& s,
                          double scale) {
  if (!s) return "n/a";
  return Fixed2(s->mean * scale) + " ± " + Fixed2(s->stddev * scale);
}

// Collects numbered footnotes for failed cells in render order.
class Footnotes {
 public:
  std::string Mark(const std::string& where, const std::string& reason) {
    notes_.push_back(where + ": " + reason);
    return std::string(kDash) + " [" + std::to_string(notes_.size()) + "]";
  }
  void Render(std::ostringstream& out) const {
    if (notes_.empty()) return;
    out << "\n";
    for (std::size_t i = 0; i < notes_.size(); ++i) {
      out << "[" << (i + 1) << "] " << notes_[i] << "\n";
    }
  }

 private:
  std::vector<std::string> notes_;
};

std::string EscapeCell(std::string text) {
  std::string out;
  for (char ch : text) {
    if (ch == '|') out += "\\|";
    else if (ch == '\n') out += ' ';
    else out += ch;
  }
  return out;
}

struct TaskTable {
  std::string title;
  double scale;              // AUROC fraction -> percent
  std::optional<double> RunResult::*accuracy;
  std::optional<double> RunResult::*de_accuracy;
  std::optional<MetricSummary> EvalReport::*accuracy_summary;
  std::optional<MetricSummary> EvalReport::*de_accuracy_summary;
  std::optional<double> CellResult::*metric;
  std::optional<MetricSummary> DetectorAggregate::*aggregate;
};

void RenderTable(const EvalReport& report, const TaskTable& table,
                 std::ostringstream& out) {
  bool has_de = false;
  for (const auto& d : report.detectors) {
    if (d == kDeTotalUncertainty || d == kDeEpistemicUncertainty) has_de = true;
  }
  out << "## " << table.title << "\n\n";
  out << "| Split | Seed | Acc%";
  if (has_de) out << " | DE Acc%";
  for (const auto& d : report.detectors) out << " | " << DetectorDisplayName(d);
  out << " |\n|---|---:|---:";
  if (has_de) out << "|---:";
  for (std::size_t i = 0; i < report.detectors.size(); ++i) out << "|---:";
  out << "|\n";

  Footnotes notes;
  const auto accuracy_cell = [&](const RunResult& run,
                                 std::optional<double> RunResult::*field) {
    if (const auto& v = run.*field) return Fixed2(*v);
    if (!run.ok()) {
      return notes.Mark(run.split + " seed " + std::to_string(run.seed),
                        EscapeCell(run.failure));
    }
    return std::string("n/a");
  };
  for (const auto& run : report.runs) {
    out << "| " << EscapeCell(run.split) << " | " << run.seed << " | "
        << accuracy_cell(run, table.accuracy);
    if (has_de) out << " | " << accuracy_cell(run, table.de_accuracy);
    for (const auto& d : report.detectors) {
      out << " | ";
      const CellResult* cell = report.FindCell(run.split, run.seed, d);
      if (cell && cell->*table.metric) {
        out << Fixed2(*(cell->*table.metric) * table.scale);
      } else if (cell && !cell->ok() && run.ok()) {
        out << notes.Mark(
            run.split + " seed " + std::to_string(run.seed) + ", " +
                DetectorDisplayName(d),
            EscapeCell(cell->failure));
      } else if (cell && !cell->ok()) {
        out << kDash;
      } else {
        out << "n/a";
      }
    }
    out << " |\n";
  }
  if (report.runs.size() > 1) {
    out << "| mean ± std | | "
        << FormatSummary(report.*table.accuracy_summary, 1.0);
    if (has_de) out << " | " << FormatSummary(report.*table.de_accuracy_summary, 1.0);
    for (const auto& d : report.detectors) {
      out << " | ";
      const DetectorAggregate* agg = nullptr;
      for (const auto& a : report.aggregates) {
        if (a.detector == d) agg = &a;
      }
      out << (agg ? FormatSummary(agg->*table.aggregate, table.scale)
                  : std::string("n/a"));
    }
    out << " |\n";
  }
  notes.Render(out);
}

std::string ToMarkdown(const EvalReport& report) {
  std::ostringstream out;
  RenderTable(report,
              {"ID Acc% & S-OODD AUROC%", 100.0,
               &RunResult::id_accuracy, &RunResult::de_id_accuracy,
               &EvalReport::id_accuracy, &EvalReport::de_id_accuracy,
               &CellResult::auroc, &DetectorAggregate::auroc},
              out);
  out << "\n";
  RenderTable(report,
              {"Covariate OOD Acc% & MC-OODD PRR%", 1.0,
               &RunResult::covariate_accuracy,
               &RunResult::de_covariate_accuracy,
               &EvalReport::covariate_accuracy,
               &EvalReport::de_covariate_accuracy, &CellResult::prr,
               &DetectorAggregate::prr},
              out);
  return out.str();
}

std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string Exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string ToCsv(const EvalReport& report) {
  std::ostringstream out;
  out << "split,seed,detector,metric,value,status,note\n";
  const auto row = [&out](const std::string& split, std::uint64_t seed,
                          const std::string& detector, const std::string& metric,
                          const std::optional<double>& value,
                          const std::string& note) {
    out << CsvField(split) << "," << seed << "," << CsvField(detector) << ","
        << CsvField(metric) << "," << (value ? Exact(*value) : "") << ","
        << (note.empty() ? "ok" : "failed") << "," << CsvField(note) << "\n";
  };
  for (const auto& r : report.runs) {
    if (!r.ok()) row(r.split, r.seed, "", "", std::nullopt, r.failure);
    const std::pair<const char*, std::optional<double>> metrics[] = {
        {"id_accuracy", r.id_accuracy},
        {"covariate_accuracy", r.covariate_accuracy},
        {"de_id_accuracy", r.de_id_accuracy},
        {"de_covariate_accuracy", r.de_covariate_accuracy}};
    for (const auto& [name, value] : metrics) {
      if (value) row(r.split, r.seed, "", name, value, "");
    }
    for (const auto& [dump, value] : r.covariate_accuracy_by_dump) {
      row(r.split, r.seed, "", "covariate_accuracy:" + dump, value, "");
    }
  }
  for (const auto& c : report.cells) {
    if (!c.ok()) row(c.split, c.seed, c.detector, "", std::nullopt, c.failure);
    const std::pair<const char*, std::optional<double>> metrics[] = {
        {"auroc", c.auroc},
        {"prr", c.prr},
        {"prr_tie_randomized", c.prr_tie_randomized}};
    for (const auto& [name, value] : metrics) {
      if (value) row(c.split, c.seed, c.detector, name, value, "");
    }
    for (const auto& [dump, value] : c.prr_by_dump) {
      row(c.split, c.seed, c.detector, "prr:" + dump, value, "");
    }
  }
  return out.str();
}

}  // namespace

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "md" || name == "markdown") return ReportFormat::kMarkdown;
  if (name == "csv") return ReportFormat::kCsv;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown report format '" + std::string(name) + "'");
}

std::string EmitReport(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson:
      return ToJsonText(report);
    case ReportFormat::kMarkdown:
      return ToMarkdown(report);
    case ReportFormat::kCsv:
      return ToCsv(report);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown report format");
}

EvalReport ReportFromJson(std::string_view json_text) {
  EvalReport report;
  try {
    const json doc = json::parse(json_text);
    report.detectors = doc.at("detectors").get<std::vector<std::string>>();
    for (const auto& j : doc.at("runs")) {
      RunResult r;
      r.split = j.at("split").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.failure = j.at("failure").get<std::string>();
      r.id_accuracy = OptionalFrom(j.at("id_accuracy"));
      r.covariate_accuracy = OptionalFrom(j.at("covariate_accuracy"));
      r.covariate_accuracy_by_dump =
          j.at("covariate_accuracy_by_dump").get<std::map<std::string, double>>();
      r.de_id_accuracy = OptionalFrom(j.at("de_id_accuracy"));
      r.de_covariate_accuracy = OptionalFrom(j.at("de_covariate_accuracy"));
      r.num_id_train = j.at("num_id_train").get<std::size_t>();
      r.num_id_test = j.at("num_id_test").get<std::size_t>();
      r.num_semantic_ood = j.at("num_semantic_ood").get<std::size_t>();
      r.num_covariate = j.at("num_covariate").get<std::size_t>();
      report.runs.push_back(std::move(r));
    }
    for (const auto& j : doc.at("cells")) {
      CellResult c;
      c.split = j.at("split").get<std::string>();
      c.seed = j.at("seed").get<std::uint64_t>();
      c.detector = j.at("detector").get<std::string>();
      c.failure = j.at("failure").get<std::string>();
      c.auroc = OptionalFrom(j.at("auroc"));
      c.prr = OptionalFrom(j.at("prr"));
      c.prr_tie_randomized = OptionalFrom(j.at("prr_tie_randomized"));
      c.prr_by_dump = j.at("prr_by_dump").get<std::map<std::string, double>>();
      c.num_id_test = j.at("num_id_test").get<std::size_t>();
      c.num_semantic_ood = j.at("num_semantic_ood").get<std::size_t>();
      c.num_covariate = j.at("num_covariate").get<std::size_t>();
      c.warnings = j.at("warnings").get<std::vector<std::string>>();
      report.cells.push_back(std::move(c));
    }
    report.id_accuracy = SummaryFrom(doc.at("id_accuracy"));
    report.covariate_accuracy = SummaryFrom(doc.at("covariate_accuracy"));
    report.de_id_accuracy = SummaryFrom(doc.at("de_id_accuracy"));
    report.de_covariate_accuracy = SummaryFrom(doc.at("de_covariate_accuracy"));
    for (const auto& j : doc.at("aggregates")) {
      DetectorAggregate a;
      a.detector = j.at("detector").get<std::string>();
      a.auroc = SummaryFrom(j.at("auroc"));
      a.prr = SummaryFrom(j.at("prr"));
      a.failed_cells = j.at("failed_cells").get<std::size_t>();
      report.aggregates.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformed, std::string("report JSON: ") + e.what());
  }
  return report;
}

std::string DetectorDisplayName(std::string_view detector) {
  static const std::pair<std::string_view, std::string_view> kNames[] = {
      {"msp", "MSP"},   {"maha", "Maha"}, {"react", "R+E"}, {"gradnorm", "GrN"},
      {"mls", "MLS"},   {"klm", "KLM"},   {"knn", "KNN"},   {"vim", "ViM"},
      {"gen", "GEN"},   {kDeTotalUncertainty, "DE-TU"},
      {kDeEpistemicUncertainty, "DE-EU"}};
  for (const auto& [key, label] : kNames) {
    if (key == detector) return std::string(label);
  }
  return std::string(detector);
}

}  // namespace oodkit
