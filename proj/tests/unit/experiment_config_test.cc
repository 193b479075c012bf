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
#include "oodkit/experiment_config.h"

#include <gtest/gtest.h>

#include "oodkit/error.h"

namespace oodkit {
namespace {

TEST(ExperimentConfigTest, ParsesFullDocument) {
  const ExperimentConfig cfg = ParseExperimentConfig(R"({
      "manifest": "m.json",
      "detectors": ["msp", "R+E", "vim"],
      "hyperparameters": {"react_q": 95, "knn_k": 3, "vim_dim": 2,
                          "gen_gamma": 0.2},
      "splits": [{"id": "a", "held_out": [1, 2]},
                 {"id": "b", "held_out": [0], "manifest": "/abs/other.json"}],
      "seeds": [0, 5],
      "train_subsample": 0.5,
      "ensemble": true,
      "output_dir": "out",
      "threads": 2})",
                                                     "/base");
  EXPECT_EQ(*cfg.manifest, std::filesystem::path("/base/m.json"));
  ASSERT_EQ(cfg.detectors.size(), 3u);
  EXPECT_EQ(cfg.detectors[1], DetectorKind::kReactEnergy);
  EXPECT_EQ(cfg.params.react_percentile, 95.0);
  EXPECT_EQ(*cfg.params.knn_k, 3);
  EXPECT_EQ(*cfg.params.vim_dim, 2);
  EXPECT_EQ(cfg.params.gen_gamma, 0.2);
  ASSERT_EQ(cfg.splits.size(), 2u);
  EXPECT_EQ(cfg.splits[0].held_out, (std::vector<int32_t>{1, 2}));
  EXPECT_EQ(*cfg.splits[1].manifest, std::filesystem::path("/abs/other.json"));
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{0, 5}));
  EXPECT_EQ(*cfg.train_subsample, 0.5);
  EXPECT_TRUE(cfg.ensemble);
  EXPECT_EQ(*cfg.output_dir, std::filesystem::path("/base/out"));
  EXPECT_EQ(*cfg.threads, 2);
}

TEST(ExperimentConfigTest, DefaultsToOneUnsplitRun) {
  const ExperimentConfig cfg =
      ParseExperimentConfig(R"({"manifest": "m.json"})", "/");
  EXPECT_TRUE(cfg.detectors.empty());
  const auto splits = cfg.EffectiveSplits();
  ASSERT_EQ(splits.size(), 1u);
  EXPECT_EQ(splits[0].id, "all");
  EXPECT_TRUE(splits[0].held_out.empty());
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{0}));
}

TEST(ExperimentConfigTest, RejectsInvalidDocuments) {
  const char* bad[] = {
      R"({"manifest": "m", "colour": 1})",
      R"({"detectors": "msp"})",
      R"({"manifest": "m", "detectors": "msp,odin"})",
      R"({"manifest": "m", "hyperparameters": {"temperature": 1}})",
      R"({"manifest": "m", "splits": [{"id": "a"}, {"id": "a"}]})",
      R"({"manifest": "m", "splits": [{"held_out": [1, 1]}]})",
      R"({"manifest": "m", "splits": [{"held_out": [-1]}]})",
      R"({"manifest": "m", "splits": {"id": "a"}})",
      R"({"manifest": "m", "seeds": []})",
      R"({"manifest": "m", "train_subsample": 0})",
      R"({"manifest": "m", "threads": 0})",
      R"({"manifest": 3})",
      R"(not json)",
  };
  for (const char* text : bad) {
    EXPECT_THROW(ParseExperimentConfig(text, "/"), Error) << text;
  }
}

}  // namespace
}  // namespace oodkit
