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
#ifndef OODKIT_EXPERIMENT_CONFIG_H_
#define OODKIT_EXPERIMENT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oodkit/detectors.h"

namespace oodkit {

// One open-set split: the listed classes are removed from id_train and the
// held-out rows of id_test become semantic OOD. A split may bring its own
// manifest (dumps from a model trained for that split).
struct OsrSplit {
  std::string id;
  std::vector<std::int32_t> held_out;
  std::optional<std::filesystem::path> manifest;
};

// JSON document, paths relative to the config file:
// {
//   "manifest": "manifest.json",
//   "detectors": "msp,maha,vim"            (or a list of names),
//   "hyperparameters": {"react_q": 98, "knn_k": 8, "vim_dim": 8,
//                       "gen_gamma": 0.1},
//   "splits": [{"id": "osr1", "held_out": [0, 4], "manifest": "..."}],
//   "seeds": [0, 1],
//   "train_subsample": 0.5,                 (fraction of id_train, by seed)
//   "ensemble": true,                       (DE-TU / DE-EU from members)
//   "output_dir": "out",
//   "threads": 4
// }
// With no splits, one split "all" with nothing held out is evaluated.
struct ExperimentConfig {
  std::optional<std::filesystem::path> manifest;
  std::vector<DetectorKind> detectors;
  DetectorParams params;
  std::vector<OsrSplit> splits;
  std::vector<std::uint64_t> seeds = {0};
  std::optional<double> train_subsample;
  bool ensemble = false;
  std::optional<std::filesystem::path> output_dir;
  std::optional<int> threads;

  // Splits to evaluate, substituting the implicit "all" split.
  std::vector<OsrSplit> EffectiveSplits() const;
};

ExperimentConfig ParseExperimentConfig(std::string_view json_text,
                                       const std::filesystem::path& base_dir);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& file);

}  // namespace oodkit

#endif  // OODKIT_EXPERIMENT_CONFIG_H_
