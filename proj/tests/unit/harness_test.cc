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
#include "oodkit/harness.h"

#include <fstream>

#include <gtest/gtest.h>

#include "oodkit/eds_io.h"
#include "oodkit/error.h"
#include "oodkit/report.h"
#include "oodkit/synthetic_osr.h"
#include "test_util.h"

namespace oodkit {
namespace {

namespace fs = std::filesystem;

class HarnessTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(testing::ScratchDir("harness"));
    SyntheticOsrSpec spec;
    spec.train_per_class = 120;
    spec.test_per_class = 60;
    spec.covariate_per_class = 100;
    spec.centroid_scale = 10.0 / std::sqrt(2.0);
    spec.ensemble_members = 3;
    spec.seed = 4;
    manifest_ = new fs::path(WriteSyntheticOsr(GenerateSyntheticOsr(spec), *dir_));
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
    delete manifest_;
  }

  static ExperimentConfig Config(const std::string& detectors) {
    ExperimentConfig cfg;
    cfg.manifest = *manifest_;
    cfg.detectors = ParseDetectorList(detectors);
    cfg.splits = {OsrSplit{"osr", {3, 4}, std::nullopt}};
    return cfg;
  }

  static fs::path* dir_;
  static fs::path* manifest_;
};

fs::path* HarnessTest::dir_ = nullptr;
fs::path* HarnessTest::manifest_ = nullptr;

TEST_F(HarnessTest, MahaSeparatesHeldOutClasses) {
  const EvalReport report = RunExperiment(Config("maha"));
  ASSERT_TRUE(report.AllSucceeded());
  const CellResult* cell = report.FindCell("osr", 0, "maha");
  ASSERT_NE(cell, nullptr);
  EXPECT_GT(*cell->auroc, 0.95);
  ASSERT_TRUE(cell->prr.has_value());
  EXPECT_EQ(cell->prr_by_dump.count("covariate"), 1u);
}

TEST_F(HarnessTest, PopulationBookkeeping) {
  const EvalReport report = RunExperiment(Config("msp,knn"));
  const RunResult& run = report.runs.at(0);
  EXPECT_EQ(run.num_id_train, 3u * 120u);
  EXPECT_EQ(run.num_id_test, 3u * 60u);
  EXPECT_EQ(run.num_semantic_ood, 2u * 60u);
  EXPECT_EQ(run.num_covariate, 3u * 100u);
  for (const auto& cell : report.cells) {
    EXPECT_EQ(cell.num_id_test + cell.num_semantic_ood, 5u * 60u);
    EXPECT_EQ(cell.num_covariate, 3u * 100u);
  }
  ASSERT_TRUE(run.id_accuracy.has_value());
  EXPECT_GT(*run.id_accuracy, 99.0);
}

TEST_F(HarnessTest, ZeroDetectorsGivesAccuracyOnlyReport) {
  const EvalReport report = RunExperiment(Config(""));
  EXPECT_TRUE(report.cells.empty());
  ASSERT_EQ(report.runs.size(), 1u);
  EXPECT_TRUE(report.runs[0].id_accuracy.has_value());
  EXPECT_TRUE(report.AllSucceeded());
}

TEST_F(HarnessTest, DeterministicAcrossRunsAndThreads) {
  ExperimentConfig cfg = Config("msp,maha,react,gradnorm,mls,klm,knn,vim,gen");
  cfg.ensemble = true;
  cfg.seeds = {0, 1};
  cfg.train_subsample = 0.8;
  const std::string serial =
      EmitReport(RunExperiment(cfg, 1), ReportFormat::kJson);
  EXPECT_EQ(serial, EmitReport(RunExperiment(cfg, 1), ReportFormat::kJson));
  EXPECT_EQ(serial, EmitReport(RunExperiment(cfg, 4), ReportFormat::kJson));
}

TEST_F(HarnessTest, EnsembleCellsAndAccuracy) {
  ExperimentConfig cfg = Config("msp");
  cfg.ensemble = true;
  const EvalReport report = RunExperiment(cfg);
  ASSERT_TRUE(report.AllSucceeded());
  EXPECT_EQ(report.detectors,
            (std::vector<std::string>{"msp", kDeTotalUncertainty,
                                      kDeEpistemicUncertainty}));
  EXPECT_TRUE(report.runs[0].de_id_accuracy.has_value());
  EXPECT_TRUE(report.runs[0].de_covariate_accuracy.has_value());
  EXPECT_GT(*report.FindCell("osr", 0, kDeTotalUncertainty)->auroc, 0.9);
}

TEST_F(HarnessTest, AggregateMeanEqualsCellMean) {
  ExperimentConfig cfg = Config("knn,gen");
  cfg.seeds = {0, 1, 2};
  cfg.train_subsample = 0.5;
  const EvalReport report = RunExperiment(cfg);
  for (const auto& agg : report.aggregates) {
    double sum = 0;
    int count = 0;
    for (const auto& cell : report.cells) {
      if (cell.detector == agg.detector && cell.auroc) {
        sum += *cell.auroc;
        ++count;
      }
    }
    ASSERT_EQ(agg.auroc->count, 3u);
    EXPECT_NEAR(agg.auroc->mean, sum / count, 1e-12);
  }
  EXPECT_EQ(report.runs[0].num_id_train, 180u);
}

TEST_F(HarnessTest, UnknownTestClassIsAConfigError) {
  const EmbeddingSet train = ReadEdsFile(*dir_ / "train.eds");
  const EmbeddingSet test = ReadEdsFile(*dir_ / "test.eds");
  std::vector<int32_t> labels = *test.labels();
  labels[0] = 9;
  WriteEdsFile(test.WithLabels(labels), *dir_ / "test_bad.eds");
  std::ofstream(*dir_ / "bad.json")
      << R"({"id_train": "train.eds", "id_test": "test_bad.eds", "head": "head.head"})";
  ExperimentConfig cfg = Config("msp");
  cfg.manifest = *dir_ / "bad.json";
  const EvalReport report = RunExperiment(cfg);
  EXPECT_FALSE(report.AllSucceeded());
  EXPECT_NE(report.runs[0].failure.find("class 9"), std::string::npos);
  EXPECT_FALSE(report.cells[0].ok());
}

TEST_F(HarnessTest, WrongHeldOutCountFailsTheRunNotTheSweep) {
  ExperimentConfig cfg = Config("msp");
  cfg.splits.push_back(OsrSplit{"too_few", {4}, std::nullopt});
  const EvalReport report = RunExperiment(cfg);
  ASSERT_EQ(report.runs.size(), 2u);
  EXPECT_TRUE(report.runs[0].ok());
  EXPECT_FALSE(report.runs[1].ok());
  EXPECT_TRUE(report.cells[0].ok());
  EXPECT_FALSE(report.cells[1].ok());
}

TEST(SummarizeTest, SampleStandardDeviation) {
  EXPECT_FALSE(Summarize({}).has_value());
  const auto one = *Summarize({2.0});
  EXPECT_EQ(one.stddev, 0.0);
  const auto s = *Summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.stddev, std::sqrt(5.0 / 3.0));
}

TEST(ThreadCountTest, EnvironmentCapsConfiguredThreads) {
  ExperimentConfig cfg;
  cfg.threads = 8;
  ::setenv("OODKIT_THREADS", "3", 1);
  EXPECT_EQ(ResolveThreadCount(cfg), 3);
  ::setenv("OODKIT_THREADS", "16", 1);
  EXPECT_EQ(ResolveThreadCount(cfg), 8);
  ::unsetenv("OODKIT_THREADS");
  EXPECT_EQ(ResolveThreadCount(cfg), 8);
}

}  // namespace
}  // namespace oodkit
