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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <utility>

#include "oodkit/detectors.h"
#include "oodkit/ensemble.h"
#include "oodkit/error.h"
#include "oodkit/manifest.h"
#include "oodkit/metrics.h"

namespace oodkit {
namespace {

namespace fs = std::filesystem;

struct EnsembleView {
  std::string failure;
  std::optional<EnsembleBatch> id_test;
  std::optional<EnsembleBatch> semantic;
  std::optional<EnsembleBatch> covariate;
  std::vector<bool> covariate_correct;
};

// Everything a cell needs, prepared once per (split, seed). Read-only while
// cells run.
struct PreparedRun {
  RunResult result;
  std::optional<EmbeddingSet> train;
  std::optional<EmbeddingSet> id_test;
  std::optional<EmbeddingSet> semantic;
  std::optional<EmbeddingSet> covariate;
  std::vector<std::pair<std::string, std::size_t>> covariate_dumps;
  std::vector<bool> covariate_correct;
  std::optional<ModelHead> head;
  EnsembleView ensemble;
};

struct LoadOutcome {
  std::shared_ptr<const LoadedDatasets> data;
  std::string failure;
};

std::vector<bool> Correctness(const Matrix& logits,
                              const std::vector<int32_t>& labels) {
  const auto predicted = ArgmaxRows(logits);
  std::vector<bool> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = predicted[i] == labels[i];
  }
  return out;
}

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

EmbeddingSet WithoutLabels(const EmbeddingSet& set) {
  return set.WithLabels(std::nullopt);
}

// Stacks row subsets of aligned dumps; empty when nothing is selected.
std::optional<EmbeddingSet> Stack(const std::vector<EmbeddingSet>& parts) {
  std::vector<EmbeddingSet> nonempty;
  for (const auto& p : parts) {
    if (p.size() > 0) nonempty.push_back(p);
  }
  if (nonempty.empty()) return std::nullopt;
  return EmbeddingSet::Concatenate(nonempty);
}

EnsembleView PrepareEnsemble(const LoadedDatasets& data,
                             const std::vector<std::size_t>& id_rows,
                             const std::vector<std::size_t>& held_rows,
                             const std::vector<std::vector<std::size_t>>& cov_rows,
                             const std::optional<std::vector<int32_t>>& id_labels,
                             const std::vector<int32_t>& cov_labels,
                             RunResult& result) {
  EnsembleView view;
  if (data.id_test_members.empty()) {
    view.failure = "ensemble requested but the manifest lists no members";
    return view;
  }
  const std::size_t members = data.id_test_members.size();
  std::vector<EmbeddingSet> id_parts;
  std::vector<EmbeddingSet> sem_parts;
  std::vector<EmbeddingSet> cov_parts;
  for (std::size_t m = 0; m < members; ++m) {
    id_parts.push_back(data.id_test_members[m].SelectRows(id_rows));
    std::vector<EmbeddingSet> sem;
    if (!data.semantic_ood_members.empty()) {
      sem.push_back(WithoutLabels(data.semantic_ood_members[m]));
    }
    sem.push_back(WithoutLabels(data.id_test_members[m].SelectRows(held_rows)));
    if (auto stacked = Stack(sem)) sem_parts.push_back(std::move(*stacked));
    std::vector<EmbeddingSet> cov;
    for (std::size_t d = 0; d < data.covariate_ood_members.size(); ++d) {
      cov.push_back(
          WithoutLabels(data.covariate_ood_members[d][m].SelectRows(cov_rows[d])));
    }
    if (auto stacked = Stack(cov)) cov_parts.push_back(std::move(*stacked));
  }
  if (!id_rows.empty()) {
    view.id_test = EnsembleBatch::FromMemberLogits(id_parts);
    if (id_labels) {
      result.de_id_accuracy =
          BalancedAccuracy(DeAverage(*view.id_test).predictions, *id_labels);
    }
  }
  if (sem_parts.size() == members) {
    view.semantic = EnsembleBatch::FromMemberLogits(sem_parts);
  }
  if (cov_parts.size() == members) {
    view.covariate = EnsembleBatch::FromMemberLogits(cov_parts);
    const auto predicted = DeAverage(*view.covariate).predictions;
    result.de_covariate_accuracy = BalancedAccuracy(predicted, cov_labels);
    view.covariate_correct.resize(cov_labels.size());
    for (std::size_t i = 0; i < cov_labels.size(); ++i) {
      view.covariate_correct[i] = predicted[i] == cov_labels[i];
    }
  }
  return view;
}

PreparedRun PrepareRun(const ExperimentConfig& config, const OsrSplit& split,
                       std::uint64_t seed, const LoadedDatasets& data) {
  PreparedRun run;
  run.result.split = split.id;
  run.result.seed = seed;
  run.head = data.head;

  const std::set<int32_t> held(split.held_out.begin(), split.held_out.end());
  const auto is_held = [&held](int32_t label) { return held.count(label) > 0; };

  if (!data.id_train.has_labels()) {
    throw Error(ErrorCode::kMissingInput, "id_train carries no labels");
  }
  const auto& train_labels = *data.id_train.labels();
  std::vector<std::size_t> train_rows;
  std::set<int32_t> id_class_set;
  for (std::size_t i = 0; i < train_labels.size(); ++i) {
    if (!is_held(train_labels[i])) {
      train_rows.push_back(i);
      id_class_set.insert(train_labels[i]);
    }
  }
  const std::size_t c = data.id_train.num_classes();
  if (id_class_set.size() != c) {
    throw Error(ErrorCode::kConfig,
                "split '" + split.id + "': id_train holds " +
                    std::to_string(id_class_set.size()) +
                    " in-distribution classes but the classifier has " +
                    std::to_string(c) + " logits");
  }
  // Logit index k scores the k-th smallest in-distribution class.
  std::map<int32_t, int32_t> to_logit;
  for (int32_t cls : id_class_set) {
    const auto index = static_cast<int32_t>(to_logit.size());
    to_logit[cls] = index;
  }
  const auto remap = [&](const std::vector<int32_t>& labels,
                         const std::vector<std::size_t>& rows,
                         const char* role) {
    std::vector<int32_t> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) {
      auto it = to_logit.find(labels[r]);
      if (it == to_logit.end()) {
        throw Error(ErrorCode::kConfig,
                    "split '" + split.id + "': class " +
                        std::to_string(labels[r]) + " appears in " + role +
                        " but never in id_train");
      }
      out.push_back(it->second);
    }
    return out;
  };

  if (config.train_subsample) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = train_rows.size(); i > 1; --i) {
      std::swap(train_rows[i - 1], train_rows[rng() % i]);
    }
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(
               *config.train_subsample * static_cast<double>(train_rows.size()))));
    train_rows.resize(keep);
    std::sort(train_rows.begin(), train_rows.end());
  }
  run.train = data.id_train.SelectRows(train_rows)
                  .WithLabels(remap(train_labels, train_rows, "id_train"));
  run.result.num_id_train = run.train->size();

  // id_test: held-out rows move to the semantic population.
  std::vector<std::size_t> id_rows;
  std::vector<std::size_t> held_rows;
  std::optional<std::vector<int32_t>> id_labels;
  if (data.id_test.has_labels()) {
    const auto& labels = *data.id_test.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      (is_held(labels[i]) ? held_rows : id_rows).push_back(i);
    }
    id_labels = remap(labels, id_rows, "id_test");
  } else {
    if (!held.empty()) {
      throw Error(ErrorCode::kConfig,
                  "split '" + split.id +
                      "' holds out classes but id_test carries no labels");
    }
    id_rows = AllRows(data.id_test.size());
  }
  run.id_test = data.id_test.SelectRows(id_rows).WithLabels(id_labels);
  run.result.num_id_test = run.id_test->size();

  std::vector<EmbeddingSet> semantic_parts;
  if (data.semantic_ood) semantic_parts.push_back(WithoutLabels(*data.semantic_ood));
  semantic_parts.push_back(WithoutLabels(data.id_test.SelectRows(held_rows)));
  run.semantic = Stack(semantic_parts);
  run.result.num_semantic_ood = run.semantic ? run.semantic->size() : 0;

  // Covariate dumps: rows of held-out classes are not covariate OOD for this
  // split and are dropped.
  std::vector<std::vector<std::size_t>> cov_rows;
  std::vector<EmbeddingSet> cov_parts;
  std::vector<int32_t> cov_labels;
  for (std::size_t d = 0; d < data.covariate_ood.size(); ++d) {
    const EmbeddingSet& dump = data.covariate_ood[d];
    const auto& labels = *dump.labels();
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!is_held(labels[i])) rows.push_back(i);
    }
    auto remapped = remap(labels, rows, "covariate_ood");
    EmbeddingSet part = dump.SelectRows(rows).WithLabels(remapped);
    if (part.size() > 0) {
      run.result.covariate_accuracy_by_dump[data.covariate_names[d]] =
          BalancedAccuracy(ArgmaxRows(part.logits()), remapped);
    }
    run.covariate_dumps.emplace_back(data.covariate_names[d], part.size());
    cov_labels.insert(cov_labels.end(), remapped.begin(), remapped.end());
    cov_parts.push_back(std::move(part));
    cov_rows.push_back(std::move(rows));
  }
  run.covariate = Stack(cov_parts);
  run.result.num_covariate = run.covariate ? run.covariate->size() : 0;
  if (run.covariate) {
    run.covariate_correct = Correctness(run.covariate->logits(), cov_labels);
    run.result.covariate_accuracy =
        BalancedAccuracy(ArgmaxRows(run.covariate->logits()), cov_labels);
  }
  if (id_labels && !id_labels->empty()) {
    run.result.id_accuracy =
        BalancedAccuracy(ArgmaxRows(run.id_test->logits()), *id_labels);
  }
  if (config.ensemble) {
    run.ensemble = PrepareEnsemble(data, id_rows, held_rows, cov_rows, id_labels,
                                   cov_labels, run.result);
  }
  return run;
}

std::string Describe(const std::exception& e) { return e.what(); }

// S-OODD and MC-OODD metrics for one score function. score_fn is called on
// each population it needs.
template <typename Population, typename ScoreFn>
void EvaluateCell(const std::optional<Population>& id_test,
                  const std::optional<Population>& semantic,
                  const std::optional<Population>& covariate,
                  const std::vector<bool>& covariate_correct,
                  const std::vector<std::pair<std::string, std::size_t>>& dumps,
                  ScoreFn score_fn, CellResult& cell) {
  std::vector<std::string> failures;
  if (id_test && semantic && id_test->size() > 0 && semantic->size() > 0) {
    try {
      std::vector<double> scores = score_fn(*id_test);
      const std::vector<double> ood = score_fn(*semantic);
      std::vector<bool> positive(scores.size(), false);
      scores.insert(scores.end(), ood.begin(), ood.end());
      positive.resize(scores.size(), true);
      cell.auroc = Auroc(scores, positive);
      cell.num_id_test = id_test->size();
      cell.num_semantic_ood = semantic->size();
    } catch (const std::exception& e) {
      failures.push_back("S-OODD: " + Describe(e));
    }
  }
  if (covariate && covariate->size() > 0) {
    try {
      const std::vector<double> scores = score_fn(*covariate);
      cell.num_covariate = scores.size();
      try {
        const PrrResult prr = Prr(scores, covariate_correct);
        cell.prr = prr.prr;
        cell.prr_tie_randomized = prr.tie_randomized;
      } catch (const Error& e) {
        failures.push_back("MC-OODD: " + Describe(e));
      }
      std::size_t offset = 0;
      for (const auto& [name, count] : dumps) {
        if (count > 0) {
          const std::span<const double> part(scores.data() + offset, count);
          const std::vector<bool> correct(
              covariate_correct.begin() + static_cast<long>(offset),
              covariate_correct.begin() + static_cast<long>(offset + count));
          try {
            cell.prr_by_dump[name] = Prr(part, correct).prr;
          } catch (const Error& e) {
            cell.warnings.push_back("PRR for " + name + ": " + e.message());
          }
        }
        offset += count;
      }
    } catch (const std::exception& e) {
      failures.push_back("MC-OODD: " + Describe(e));
    }
  }
  for (const auto& f : failures) {
    if (!cell.failure.empty()) cell.failure += "; ";
    cell.failure += f;
  }
}

void RunDetectorCell(const ExperimentConfig& config, const PreparedRun& run,
                     DetectorKind kind, CellResult& cell) {
  try {
    const ModelHead* head = run.head ? &*run.head : nullptr;
    const DetectorState state =
        Fit(kind, config.params, *run.train, head, &cell.warnings);
    EvaluateCell(
        run.id_test, run.semantic, run.covariate, run.covariate_correct,
        run.covariate_dumps,
        [&state](const EmbeddingSet& batch) { return Score(state, batch); },
        cell);
  } catch (const std::exception& e) {
    cell.failure = "fit: " + Describe(e);
  }
}

void RunEnsembleCell(const PreparedRun& run, bool epistemic, CellResult& cell) {
  const EnsembleView& de = run.ensemble;
  if (!de.failure.empty()) {
    cell.failure = de.failure;
    return;
  }
  std::vector<std::pair<std::string, std::size_t>> dumps = run.covariate_dumps;
  EvaluateCell(
      de.id_test, de.semantic, de.covariate, de.covariate_correct, dumps,
      [epistemic](const EnsembleBatch& batch) {
        return epistemic ? EpistemicUncertainty(batch) : TotalUncertainty(batch);
      },
      cell);
}

void ParallelFor(std::size_t count, int threads,
                 const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(
      std::clamp<long>(threads, 1, static_cast<long>(std::max<std::size_t>(1, count))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

bool EvalReport::AllSucceeded() const {
  return std::all_of(runs.begin(), runs.end(),
                     [](const RunResult& r) { return r.ok(); }) &&
         std::all_of(cells.begin(), cells.end(),
                     [](const CellResult& c) { return c.ok(); });
}

const CellResult* EvalReport::FindCell(const std::string& split,
                                       std::uint64_t seed,
                                       const std::string& detector) const {
  for (const auto& c : cells) {
    if (c.split == split && c.seed == seed && c.detector == detector) return &c;
  }
  return nullptr;
}

std::optional<MetricSummary> Summarize(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  MetricSummary s;
  s.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

void ComputeAggregates(EvalReport& report) {
  const auto collect = [&report](auto member) {
    std::vector<double> values;
    for (const auto& run : report.runs) {
      if (const auto& v = run.*member) values.push_back(*v);
    }
    return Summarize(values);
  };
  report.id_accuracy = collect(&RunResult::id_accuracy);
  report.covariate_accuracy = collect(&RunResult::covariate_accuracy);
  report.de_id_accuracy = collect(&RunResult::de_id_accuracy);
  report.de_covariate_accuracy = collect(&RunResult::de_covariate_accuracy);
  report.aggregates.clear();
  for (const auto& name : report.detectors) {
    DetectorAggregate agg;
    agg.detector = name;
    std::vector<double> aurocs;
    std::vector<double> prrs;
    for (const auto& cell : report.cells) {
      if (cell.detector != name) continue;
      if (!cell.ok()) ++agg.failed_cells;
      if (cell.auroc) aurocs.push_back(*cell.auroc);
      if (cell.prr) prrs.push_back(*cell.prr);
    }
    agg.auroc = Summarize(aurocs);
    agg.prr = Summarize(prrs);
    report.aggregates.push_back(std::move(agg));
  }
}

int ResolveThreadCount(const ExperimentConfig& config) {
  int threads = config.threads.value_or(
      static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  if (const char* env = std::getenv("OODKIT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) {
      threads = std::min<int>(threads, static_cast<int>(cap));
    }
  }
  return std::max(1, threads);
}

EvalReport RunExperiment(const ExperimentConfig& config, int threads) {
  EvalReport report;
  for (DetectorKind kind : config.detectors) {
    report.detectors.emplace_back(DetectorName(kind));
  }
  if (config.ensemble) {
    report.detectors.emplace_back(kDeTotalUncertainty);
    report.detectors.emplace_back(kDeEpistemicUncertainty);
  }

  // Load each manifest once, serially.
  std::map<fs::path, LoadOutcome> loaded;
  const auto splits = config.EffectiveSplits();
  for (const auto& split : splits) {
    const fs::path path = split.manifest ? *split.manifest : *config.manifest;
    if (loaded.count(path)) continue;
    LoadOutcome outcome;
    try {
      outcome.data = std::make_shared<const LoadedDatasets>(
          LoadDatasets(LoadManifest(path)));
    } catch (const std::exception& e) {
      outcome.failure = "load: " + Describe(e);
    }
    loaded.emplace(path, std::move(outcome));
  }

  std::vector<PreparedRun> runs;
  for (const auto& split : splits) {
    const LoadOutcome& source =
        loaded.at(split.manifest ? *split.manifest : *config.manifest);
    for (std::uint64_t seed : config.seeds) {
      PreparedRun run;
      run.result.split = split.id;
      run.result.seed = seed;
      if (!source.failure.empty()) {
        run.result.failure = source.failure;
      } else {
        try {
          run = PrepareRun(config, split, seed, *source.data);
        } catch (const std::exception& e) {
          run = PreparedRun{};
          run.result.split = split.id;
          run.result.seed = seed;
          run.result.failure = "prepare: " + Describe(e);
        }
      }
      runs.push_back(std::move(run));
    }
  }

  const std::size_t per_run = report.detectors.size();
  report.cells.resize(runs.size() * per_run);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (std::size_t j = 0; j < per_run; ++j) {
      CellResult& cell = report.cells[r * per_run + j];
      cell.split = runs[r].result.split;
      cell.seed = runs[r].result.seed;
      cell.detector = report.detectors[j];
    }
  }
  ParallelFor(report.cells.size(), threads, [&](std::size_t index) {
    const PreparedRun& run = runs[index / per_run];
    const std::size_t j = index % per_run;
    CellResult& cell = report.cells[index];
    if (!run.result.ok()) {
      cell.failure = run.result.failure;
      return;
    }
    if (j < config.detectors.size()) {
      RunDetectorCell(config, run, config.detectors[j], cell);
    } else {
      RunEnsembleCell(run, j == config.detectors.size() + 1, cell);
    }
  });

  for (auto& run : runs) report.runs.push_back(std::move(run.result));
  ComputeAggregates(report);
  return report;
}

}  // namespace oodkit
