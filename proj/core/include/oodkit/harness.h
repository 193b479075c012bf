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
#ifndef OODKIT_HARNESS_H_
#define OODKIT_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oodkit/experiment_config.h"

namespace oodkit {

// Detector column names used for the ensemble rows.
inline constexpr char kDeTotalUncertainty[] = "de-tu";
inline constexpr char kDeEpistemicUncertainty[] = "de-eu";

// Accuracy bookkeeping for one (split, seed).
struct RunResult {
  std::string split;
  std::uint64_t seed = 0;
  std::string failure;  // empty when the run's data prepared cleanly
  std::optional<double> id_accuracy;         // balanced, percent
  std::optional<double> covariate_accuracy;  // pooled, balanced, percent
  std::map<std::string, double> covariate_accuracy_by_dump;
  std::optional<double> de_id_accuracy;
  std::optional<double> de_covariate_accuracy;
  std::size_t num_id_train = 0;
  std::size_t num_id_test = 0;
  std::size_t num_semantic_ood = 0;
  std::size_t num_covariate = 0;

  bool ok() const { return failure.empty(); }
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

// One (split, seed, detector) evaluation.
struct CellResult {
  std::string split;
  std::uint64_t seed = 0;
  std::string detector;
  std::string failure;  // empty on success
  std::optional<double> auroc;  // S-OODD, fraction in [0, 1]
  std::optional<double> prr;    // MC-OODD on pooled covariate sets, percent
  std::optional<double> prr_tie_randomized;
  std::map<std::string, double> prr_by_dump;
  // Populations actually scored: S-OODD uses id_test + semantic_ood.
  std::size_t num_id_test = 0;
  std::size_t num_semantic_ood = 0;
  std::size_t num_covariate = 0;
  std::vector<std::string> warnings;

  bool ok() const { return failure.empty(); }
  friend bool operator==(const CellResult&, const CellResult&) = default;
};

struct MetricSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
  friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

struct DetectorAggregate {
  std::string detector;
  std::optional<MetricSummary> auroc;
  std::optional<MetricSummary> prr;
  std::size_t failed_cells = 0;
  friend bool operator==(const DetectorAggregate&,
                         const DetectorAggregate&) = default;
};

struct EvalReport {
  std::vector<std::string> detectors;  // column order
  std::vector<RunResult> runs;
  std::vector<CellResult> cells;
  std::optional<MetricSummary> id_accuracy;
  std::optional<MetricSummary> covariate_accuracy;
  std::optional<MetricSummary> de_id_accuracy;
  std::optional<MetricSummary> de_covariate_accuracy;
  std::vector<DetectorAggregate> aggregates;

  bool AllSucceeded() const;
  const CellResult* FindCell(const std::string& split, std::uint64_t seed,
                             const std::string& detector) const;
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

std::optional<MetricSummary> Summarize(const std::vector<double>& values);

// Fills the aggregate fields from runs and cells.
void ComputeAggregates(EvalReport& report);

// Number of worker threads: config.threads, else the hardware concurrency,
// capped by OODKIT_THREADS when set; never below 1.
int ResolveThreadCount(const ExperimentConfig& config);

// Fits every configured detector on id_train per (split, seed) and scores
// the S-OODD and MC-OODD populations. Failures are recorded per run or per
// cell; the sweep never aborts. The result does not depend on threads.
EvalReport RunExperiment(const ExperimentConfig& config, int threads = 1);

}  // namespace oodkit

#endif  // OODKIT_HARNESS_H_
