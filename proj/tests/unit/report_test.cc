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

#include <gtest/gtest.h>

#include "oodkit/error.h"

namespace oodkit {
namespace {

EvalReport OneCell() {
  EvalReport report;
  report.detectors = {"maha"};
  RunResult run;
  run.split = "osr1";
  run.id_accuracy = 91.25;
  run.covariate_accuracy = 80.0;
  run.covariate_accuracy_by_dump = {{"blur", 80.0}};
  run.num_id_train = 10;
  report.runs.push_back(run);
  CellResult cell;
  cell.split = "osr1";
  cell.detector = "maha";
  cell.auroc = 0.987654321;
  cell.prr = 42.5;
  cell.prr_by_dump = {{"blur", 42.5}};
  cell.num_id_test = 5;
  cell.num_semantic_ood = 3;
  cell.num_covariate = 7;
  cell.warnings = {"something odd"};
  report.cells.push_back(cell);
  ComputeAggregates(report);
  return report;
}

TEST(ReportTest, JsonRoundTripIsExact) {
  EvalReport report = OneCell();
  report.cells[0].auroc = 0.1 + 0.2;
  report.runs[0].seed = 18446744073709551615ull;
  report.cells[0].seed = report.runs[0].seed;
  ComputeAggregates(report);
  const std::string json = EmitReport(report, ReportFormat::kJson);
  const EvalReport back = ReportFromJson(json);
  EXPECT_TRUE(back == report);
  EXPECT_EQ(EmitReport(back, ReportFormat::kJson), json);
}

TEST(ReportTest, OneCellMarkdownHasOneRowPerTable) {
  const std::string md = EmitReport(OneCell(), ReportFormat::kMarkdown);
  EXPECT_NE(md.find("| Split | Seed | Acc% | Maha |"), std::string::npos);
  EXPECT_NE(md.find("| osr1 | 0 | 91.25 | 98.77 |"), std::string::npos);
  EXPECT_NE(md.find("| osr1 | 0 | 80.00 | 42.50 |"), std::string::npos);
  EXPECT_EQ(md.find("mean"), std::string::npos);
}

TEST(ReportTest, FailedCellRendersDashWithFootnote) {
  EvalReport report = OneCell();
  report.cells[0].auroc.reset();
  report.cells[0].prr.reset();
  report.cells[0].failure = "fit: not positive definite";
  ComputeAggregates(report);
  const std::string md = EmitReport(report, ReportFormat::kMarkdown);
  EXPECT_NE(md.find("| \u2014 [1] |"), std::string::npos);
  EXPECT_NE(md.find("[1] osr1 seed 0, Maha: fit: not positive definite"),
            std::string::npos);
}

TEST(ReportTest, MeanRowWithSeveralRuns) {
  EvalReport report = OneCell();
  RunResult run = report.runs[0];
  run.seed = 1;
  run.id_accuracy = 93.25;
  report.runs.push_back(run);
  CellResult cell = report.cells[0];
  cell.seed = 1;
  cell.auroc = 0.5;
  report.cells.push_back(cell);
  ComputeAggregates(report);
  const std::string md = EmitReport(report, ReportFormat::kMarkdown);
  EXPECT_NE(md.find("| mean ± std | | 92.25 ± 1.41 |"), std::string::npos);
}

TEST(ReportTest, CsvIsLongForm) {
  const std::string csv = EmitReport(OneCell(), ReportFormat::kCsv);
  EXPECT_EQ(csv.rfind("split,seed,detector,metric,value,status,note\n", 0), 0u);
  EXPECT_NE(csv.find("osr1,0,maha,auroc,0.98765432099999995,ok,\n"),
            std::string::npos);
  EXPECT_NE(csv.find("osr1,0,,covariate_accuracy:blur,80,ok,\n"),
            std::string::npos);
}

TEST(ReportTest, FormatNamesAndDisplayNames) {
  EXPECT_EQ(ParseReportFormat("md"), ReportFormat::kMarkdown);
  EXPECT_EQ(ParseReportFormat("markdown"), ReportFormat::kMarkdown);
  EXPECT_EQ(ParseReportFormat("csv"), ReportFormat::kCsv);
  EXPECT_THROW(ParseReportFormat("xlsx"), Error);
  EXPECT_EQ(DetectorDisplayName("react"), "R+E");
  EXPECT_EQ(DetectorDisplayName("de-eu"), "DE-EU");
}

TEST(ReportTest, MalformedJsonIsTyped) {
  try {
    ReportFromJson("{\"detectors\": []}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformed);
  }
}

}  // namespace
}  // namespace oodkit
