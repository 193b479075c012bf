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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include "oodkit/error.h"

namespace oodkit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path ResolvePath(const json& v, const fs::path& base, const char* key) {
  if (!v.is_string()) {
    throw Error(ErrorCode::kConfig, std::string(key) + " must be a string");
  }
  fs::path p(v.get<std::string>());
  return p.is_absolute() ? p : base / p;
}

template <typename T>
T Get(const json& v, const char* key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kConfig, std::string("bad value for '") + key + "'");
  }
}

}  // namespace

std::vector<OsrSplit> ExperimentConfig::EffectiveSplits() const {
  if (!splits.empty()) return splits;
  return {OsrSplit{"all", {}, std::nullopt}};
}

ExperimentConfig ParseExperimentConfig(std::string_view json_text,
                                       const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kConfig, "config must be a JSON object");
  }
  static const std::set<std::string> kKnown = {
      "manifest", "detectors", "hyperparameters", "splits",  "seeds",
      "train_subsample", "ensemble", "output_dir", "threads"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKnown.count(key)) {
      throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  if (doc.contains("manifest")) {
    cfg.manifest = ResolvePath(doc["manifest"], base_dir, "manifest");
  }
  if (doc.contains("detectors")) {
    const json& d = doc["detectors"];
    if (d.is_string()) {
      cfg.detectors = ParseDetectorList(d.get<std::string>());
    } else if (d.is_array()) {
      std::string joined;
      for (const auto& name : d) {
        joined += Get<std::string>(name, "detectors") + ",";
      }
      cfg.detectors = ParseDetectorList(joined);
    } else {
      throw Error(ErrorCode::kConfig, "detectors must be a string or list");
    }
  }
  if (doc.contains("hyperparameters")) {
    const json& h = doc["hyperparameters"];
    if (!h.is_object()) {
      throw Error(ErrorCode::kConfig, "hyperparameters must be an object");
    }
    for (const auto& [key, value] : h.items()) {
      if (key == "react_q") {
        cfg.params.react_percentile = Get<double>(value, "react_q");
      } else if (key == "knn_k") {
        cfg.params.knn_k = Get<int>(value, "knn_k");
      } else if (key == "vim_dim") {
        cfg.params.vim_dim = Get<int>(value, "vim_dim");
      } else if (key == "gen_gamma") {
        cfg.params.gen_gamma = Get<double>(value, "gen_gamma");
      } else {
        throw Error(ErrorCode::kConfig, "unknown hyperparameter '" + key + "'");
      }
    }
  }
  if (doc.contains("splits")) {
    if (!doc["splits"].is_array()) {
      throw Error(ErrorCode::kConfig, "splits must be a list");
    }
    std::set<std::string> ids;
    for (const auto& s : doc["splits"]) {
      if (!s.is_object()) {
        throw Error(ErrorCode::kConfig, "each split must be an object");
      }
      OsrSplit split;
      split.id = s.contains("id") ? Get<std::string>(s["id"], "splits.id")
                                  : "split" + std::to_string(ids.size() + 1);
      if (!ids.insert(split.id).second) {
        throw Error(ErrorCode::kConfig, "duplicate split id '" + split.id + "'");
      }
      if (s.contains("held_out")) {
        split.held_out =
            Get<std::vector<std::int32_t>>(s["held_out"], "held_out");
      }
      std::vector<std::int32_t> sorted = split.held_out;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorCode::kConfig,
                    "split '" + split.id + "' holds out a class twice");
      }
      if (!sorted.empty() && sorted.front() < 0) {
        throw Error(ErrorCode::kConfig, "held-out class indices must be >= 0");
      }
      if (s.contains("manifest")) {
        split.manifest = ResolvePath(s["manifest"], base_dir, "splits.manifest");
      }
      cfg.splits.push_back(std::move(split));
    }
  }
  if (doc.contains("seeds")) {
    cfg.seeds = Get<std::vector<std::uint64_t>>(doc["seeds"], "seeds");
    if (cfg.seeds.empty()) {
      throw Error(ErrorCode::kConfig, "seeds must not be empty");
    }
  }
  if (doc.contains("train_subsample")) {
    const double f = Get<double>(doc["train_subsample"], "train_subsample");
    if (!(f > 0.0 && f <= 1.0)) {
      throw Error(ErrorCode::kConfig, "train_subsample must lie in (0, 1]");
    }
    cfg.train_subsample = f;
  }
  if (doc.contains("ensemble")) {
    cfg.ensemble = Get<bool>(doc["ensemble"], "ensemble");
  }
  if (doc.contains("output_dir")) {
    cfg.output_dir = ResolvePath(doc["output_dir"], base_dir, "output_dir");
  }
  if (doc.contains("threads")) {
    const int t = Get<int>(doc["threads"], "threads");
    if (t < 1) throw Error(ErrorCode::kConfig, "threads must be >= 1");
    cfg.threads = t;
  }
  for (const auto& split : cfg.EffectiveSplits()) {
    if (!split.manifest && !cfg.manifest) {
      throw Error(ErrorCode::kConfig,
                  "split '" + split.id + "' has no manifest and no default "
                  "manifest is configured");
    }
  }
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseExperimentConfig(buffer.str(), file.parent_path());
}

}  // namespace oodkit
