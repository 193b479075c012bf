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
#include "oodkit/manifest.h"

#include <fstream>

#include <gtest/gtest.h>

#include "oodkit/eds_io.h"
#include "oodkit/error.h"
#include "test_util.h"

namespace oodkit {
namespace {

namespace fs = std::filesystem;

TEST(ManifestTest, ParsesRolesRelativeToBase) {
  const DatasetManifest m = ParseManifest(
      R"({"id_train": "a.eds", "id_test": "/abs/b.eds",
          "covariate_ood": "c.eds", "head": "h.head",
          "metadata": {"model": "toy"}})",
      "/data");
  EXPECT_EQ(m.id_train, fs::path("/data/a.eds"));
  EXPECT_EQ(m.id_test, fs::path("/abs/b.eds"));
  ASSERT_EQ(m.covariate_ood.size(), 1u);
  EXPECT_EQ(m.covariate_ood[0], fs::path("/data/c.eds"));
  EXPECT_EQ(m.metadata.at("model"), "toy");
  EXPECT_FALSE(m.semantic_ood.has_value());
  EXPECT_FALSE(m.has_members());
}

TEST(ManifestTest, RejectsMissingRolesAndBadMembers) {
  EXPECT_THROW(ParseManifest(R"({"id_train": "a.eds"})", "/"), Error);
  EXPECT_THROW(ParseManifest(R"([1, 2])", "/"), Error);
  EXPECT_THROW(ParseManifest(R"({"id_train": "a", "id_test": "b",
                                 "covariate_ood": ["c", "d"],
                                 "id_test_members": ["m0", "m1"],
                                 "covariate_ood_members": [["x", "y"]]})",
                             "/"),
               Error);
}

class LoadDatasetsTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = testing::ScratchDir("manifest"); }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path Write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  fs::path dir_;
};

TEST_F(LoadDatasetsTest, LoadsAndChecksDimensions) {
  WriteEdsFile(testing::RandomSet(10, 4, 3, true, false, 1), dir_ / "train.eds");
  WriteEdsFile(testing::RandomSet(5, 4, 3, true, false, 2), dir_ / "test.eds");
  WriteEdsFile(testing::RandomSet(5, 4, 3, true, false, 3), dir_ / "blur.eds");
  WriteEdsFile(testing::RandomSet(5, 4, 3, false, false, 4), dir_ / "m0.eds");
  WriteEdsFile(testing::RandomSet(5, 4, 3, false, false, 5), dir_ / "b0.eds");
  const auto path = Write("m.json", R"({"id_train": "train.eds",
      "id_test": "test.eds", "covariate_ood": ["blur.eds"],
      "id_test_members": ["m0.eds"], "covariate_ood_members": [["b0.eds"]]})");
  const LoadedDatasets data = LoadDatasets(LoadManifest(path));
  EXPECT_EQ(data.id_train.size(), 10u);
  ASSERT_EQ(data.covariate_names.size(), 1u);
  EXPECT_EQ(data.covariate_names[0], "blur");
  EXPECT_EQ(data.id_test_members.size(), 1u);

  WriteEdsFile(testing::RandomSet(5, 6, 3, true, false, 5), dir_ / "wide.eds");
  const auto bad = Write("bad.json", R"({"id_train": "train.eds",
      "id_test": "wide.eds"})");
  try {
    LoadDatasets(LoadManifest(bad));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST_F(LoadDatasetsTest, CovariateDumpsNeedLabelsAndMembersAlign) {
  WriteEdsFile(testing::RandomSet(10, 4, 3, true, false, 1), dir_ / "train.eds");
  WriteEdsFile(testing::RandomSet(5, 4, 3, true, false, 2), dir_ / "test.eds");
  WriteEdsFile(testing::RandomSet(5, 4, 3, false, false, 3), dir_ / "nolab.eds");
  WriteEdsFile(testing::RandomSet(4, 4, 3, false, false, 4), dir_ / "m0.eds");
  EXPECT_THROW(LoadDatasets(LoadManifest(Write("a.json", R"({
      "id_train": "train.eds", "id_test": "test.eds",
      "covariate_ood": "nolab.eds"})"))),
               Error);
  EXPECT_THROW(LoadDatasets(LoadManifest(Write("b.json", R"({
      "id_train": "train.eds", "id_test": "test.eds",
      "id_test_members": ["m0.eds"]})"))),
               Error);
}

}  // namespace
}  // namespace oodkit
