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
#ifndef OODKIT_MANIFEST_H_
#define OODKIT_MANIFEST_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oodkit/embedding_set.h"

namespace oodkit {

// Role -> dump mapping. Relative paths are resolved against the directory of
// the manifest file. JSON keys:
//   id_train, id_test (required), semantic_ood, covariate_ood (string or
//   list), head, id_test_members, semantic_ood_members (lists of paths),
//   covariate_ood_members (one list per covariate dump), metadata (object of
//   strings).
struct DatasetManifest {
  std::filesystem::path id_train;
  std::filesystem::path id_test;
  std::optional<std::filesystem::path> semantic_ood;
  std::vector<std::filesystem::path> covariate_ood;
  std::optional<std::filesystem::path> head;
  std::vector<std::filesystem::path> id_test_members;
  std::vector<std::filesystem::path> semantic_ood_members;
  std::vector<std::vector<std::filesystem::path>> covariate_ood_members;
  std::map<std::string, std::string> metadata;

  bool has_members() const { return !id_test_members.empty(); }
};

DatasetManifest ParseManifest(std::string_view json_text,
                              const std::filesystem::path& base_dir);
DatasetManifest LoadManifest(const std::filesystem::path& manifest_file);

struct LoadedDatasets {
  EmbeddingSet id_train;
  EmbeddingSet id_test;
  std::optional<EmbeddingSet> semantic_ood;
  std::vector<EmbeddingSet> covariate_ood;
  // File stems of covariate dumps, used as per-dump report keys.
  std::vector<std::string> covariate_names;
  std::optional<ModelHead> head;
  std::vector<EmbeddingSet> id_test_members;
  std::vector<EmbeddingSet> semantic_ood_members;
  std::vector<std::vector<EmbeddingSet>> covariate_ood_members;
};

// Reads every referenced dump and checks that all sets share d and c, the
// head matches them, and ensemble members are row-aligned with their split.
LoadedDatasets LoadDatasets(const DatasetManifest& manifest);

}  // namespace oodkit

#endif  // OODKIT_MANIFEST_H_
