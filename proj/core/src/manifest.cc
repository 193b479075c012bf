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
#include <sstream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>
#include "oodkit/eds_io.h"
#include "oodkit/error.h"

namespace oodkit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path Resolve(const json& value, const fs::path& base, const char* key) {
  if (!value.is_string()) {
    throw Error(ErrorCode::kConfig,
                std::string("manifest key '") + key + "' must be a path string");
  }
  fs::path p(value.get<std::string>());
  return p.is_absolute() ? p : base / p;
}

std::vector<fs::path> ResolveList(const json& value, const fs::path& base,
                                  const char* key) {
  std::vector<fs::path> out;
  if (value.is_string()) {
    out.push_back(Resolve(value, base, key));
    return out;
  }
  if (!value.is_array()) {
    throw Error(ErrorCode::kConfig,
                std::string("manifest key '") + key + "' must be a list");
  }
  for (const auto& v : value) out.push_back(Resolve(v, base, key));
  return out;
}

void CheckShape(const EmbeddingSet& set, std::size_t d, std::size_t c,
                const std::string& what) {
  if (set.feature_dim() != d || set.num_classes() != c) {
    throw Error(ErrorCode::kDimensionMismatch,
                what + " has d=" + std::to_string(set.feature_dim()) +
                    ", c=" + std::to_string(set.num_classes()) +
                    "; expected d=" + std::to_string(d) +
                    ", c=" + std::to_string(c));
  }
}

std::vector<EmbeddingSet> LoadMembers(const std::vector<fs::path>& paths,
                                      const EmbeddingSet& base,
                                      const std::string& role) {
  std::vector<EmbeddingSet> out;
  for (const auto& p : paths) {
    EmbeddingSet m = ReadEdsFile(p);
    if (m.size() != base.size() || m.num_classes() != base.num_classes()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  role + " member " + p.string() +
                      " is not row-aligned with its split");
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

DatasetManifest ParseManifest(std::string_view json_text,
                              const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("manifest: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kConfig, "manifest must be a JSON object");
  }
  for (const char* key : {"id_train", "id_test"}) {
    if (!doc.contains(key)) {
      throw Error(ErrorCode::kConfig,
                  std::string("manifest is missing required role '") + key +
                      "'");
    }
  }
  DatasetManifest m;
  m.id_train = Resolve(doc["id_train"], base_dir, "id_train");
  m.id_test = Resolve(doc["id_test"], base_dir, "id_test");
  if (doc.contains("semantic_ood")) {
    m.semantic_ood = Resolve(doc["semantic_ood"], base_dir, "semantic_ood");
  }
  if (doc.contains("covariate_ood")) {
    m.covariate_ood = ResolveList(doc["covariate_ood"], base_dir,
                                  "covariate_ood");
  }
  if (doc.contains("head")) m.head = Resolve(doc["head"], base_dir, "head");
  if (doc.contains("id_test_members")) {
    m.id_test_members =
        ResolveList(doc["id_test_members"], base_dir, "id_test_members");
  }
  if (doc.contains("semantic_ood_members")) {
    m.semantic_ood_members = ResolveList(doc["semantic_ood_members"], base_dir,
                                         "semantic_ood_members");
  }
  if (doc.contains("covariate_ood_members")) {
    const json& v = doc["covariate_ood_members"];
    if (!v.is_array()) {
      throw Error(ErrorCode::kConfig,
                  "covariate_ood_members must be a list of lists");
    }
    for (const auto& inner : v) {
      m.covariate_ood_members.push_back(
          ResolveList(inner, base_dir, "covariate_ood_members"));
    }
  }
  if (doc.contains("metadata")) {
    const json& md = doc["metadata"];
    if (!md.is_object()) {
      throw Error(ErrorCode::kConfig, "metadata must be an object");
    }
    for (const auto& [k, v] : md.items()) {
      m.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  if (!m.id_test_members.empty()) {
    if (m.semantic_ood && !m.semantic_ood_members.empty() &&
        m.semantic_ood_members.size() != m.id_test_members.size()) {
      throw Error(ErrorCode::kConfig,
                  "semantic_ood_members must list one dump per member");
    }
    if (m.semantic_ood && m.semantic_ood_members.empty()) {
      throw Error(ErrorCode::kConfig,
                  "ensemble members given for id_test but not semantic_ood");
    }
    if (m.covariate_ood_members.size() != m.covariate_ood.size()) {
      throw Error(ErrorCode::kConfig,
                  "covariate_ood_members needs one member list per "
                  "covariate dump");
    }
    for (const auto& list : m.covariate_ood_members) {
      if (list.size() != m.id_test_members.size()) {
        throw Error(ErrorCode::kConfig,
                    "every split must list the same number of members");
      }
    }
  } else if (!m.semantic_ood_members.empty() ||
             !m.covariate_ood_members.empty()) {
    throw Error(ErrorCode::kConfig,
                "ensemble members require id_test_members");
  }
  return m;
}

DatasetManifest LoadManifest(const fs::path& manifest_file) {
  std::ifstream in(manifest_file);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + manifest_file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseManifest(buffer.str(), manifest_file.parent_path());
}

LoadedDatasets LoadDatasets(const DatasetManifest& manifest) {
  LoadedDatasets out{ReadEdsFile(manifest.id_train),
                     ReadEdsFile(manifest.id_test),
                     std::nullopt,
                     {},
                     {},
                     std::nullopt,
                     {},
                     {},
                     {}};
  const std::size_t d = out.id_train.feature_dim();
  const std::size_t c = out.id_train.num_classes();
  CheckShape(out.id_test, d, c, "id_test");
  if (manifest.semantic_ood) {
    out.semantic_ood = ReadEdsFile(*manifest.semantic_ood);
    CheckShape(*out.semantic_ood, d, c, "semantic_ood");
  }
  for (const auto& p : manifest.covariate_ood) {
    EmbeddingSet set = ReadEdsFile(p);
    CheckShape(set, d, c, "covariate_ood " + p.string());
    if (!set.has_labels()) {
      throw Error(ErrorCode::kMissingInput,
                  "covariate dump " + p.string() + " has no labels");
    }
    out.covariate_ood.push_back(std::move(set));
    out.covariate_names.push_back(p.stem().string());
  }
  if (manifest.head) {
    out.head = ReadHeadFile(*manifest.head);
    if (out.head->feature_dim() != d || out.head->num_classes() != c) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "head shape does not match the dumps");
    }
  }
  out.id_test_members =
      LoadMembers(manifest.id_test_members, out.id_test, "id_test");
  if (out.semantic_ood) {
    out.semantic_ood_members = LoadMembers(manifest.semantic_ood_members,
                                           *out.semantic_ood, "semantic_ood");
  }
  for (std::size_t i = 0; i < manifest.covariate_ood_members.size(); ++i) {
    out.covariate_ood_members.push_back(
        LoadMembers(manifest.covariate_ood_members[i], out.covariate_ood[i],
                    "covariate_ood"));
  }
  return out;
}

}  // namespace oodkit
