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
// oodkit command line: synthetic data, detector fit/score, experiment sweeps
// and report rendering. Exit status: 0 success, 1 some eval cells failed,
// 2 usage or input error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>
#include "oodkit/detector_state_io.h"
#include "oodkit/detectors.h"
#include "oodkit/eds_io.h"
#include "oodkit/error.h"
#include "oodkit/experiment_config.h"
#include "oodkit/harness.h"
#include "oodkit/report.h"
#include "oodkit/synthetic.h"
#include "oodkit/synthetic_osr.h"

namespace {

namespace fs = std::filesystem;
using oodkit::Error;
using oodkit::ErrorCode;

void WriteText(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, path + ": write failed");
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path + ": cannot open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::int32_t> ParseIntList(const std::string& csv) {
  std::vector<std::int32_t> out;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "not an integer: '" + item + "'");
    }
  }
  return out;
}

struct GenOptions {
  oodkit::SyntheticSpec spec;
  std::string out;
  std::string osr_dir;
  std::string held_out = "3,4";
  int test_per_class = 100;
  int covariate_per_class = 200;
  double covariate_noise = 5.0;
  double temperature = 1.0;
  int members = 0;
};

int RunGen(const GenOptions& opt) {
  if (opt.osr_dir.empty() == opt.out.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "give exactly one of --out or --osr-dir");
  }
  if (!opt.out.empty()) {
    const oodkit::SyntheticData data = oodkit::GenerateSynthetic(opt.spec);
    oodkit::WriteEdsFile(data.set, opt.out + ".eds");
    oodkit::WriteHeadFile(data.head, opt.out + ".head");
    std::cerr << "wrote " << opt.out << ".eds and " << opt.out << ".head\n";
    return 0;
  }
  oodkit::SyntheticOsrSpec spec;
  spec.num_classes = opt.spec.num_classes;
  spec.held_out = ParseIntList(opt.held_out);
  spec.feature_dim = opt.spec.feature_dim;
  spec.train_per_class = opt.spec.per_class;
  spec.test_per_class = opt.test_per_class;
  spec.covariate_per_class = opt.covariate_per_class;
  spec.centroid_scale = opt.spec.centroid_scale;
  spec.noise_scale = opt.spec.noise_scale;
  spec.covariate_noise_scale = opt.covariate_noise;
  spec.head_temperature = opt.temperature;
  spec.ensemble_members = opt.members;
  spec.seed = opt.spec.seed;
  const fs::path manifest =
      oodkit::WriteSyntheticOsr(oodkit::GenerateSyntheticOsr(spec), opt.osr_dir);
  nlohmann::json config = {
      {"manifest", manifest.filename().string()},
      {"detectors", "msp,maha,react,gradnorm,mls,klm,knn,vim,gen"},
      {"splits", {{{"id", "osr"}, {"held_out", spec.held_out}}}},
      {"seeds", {0}},
      {"ensemble", opt.members > 0}};
  WriteText(config.dump(2) + "\n", (fs::path(opt.osr_dir) / "eval.json").string());
  std::cerr << "wrote " << manifest.string() << " and eval.json\n";
  return 0;
}

struct FitOptions {
  std::string detectors = "msp,maha,react,gradnorm,mls,klm,knn,vim,gen";
  std::string train;
  std::string head;
  std::string out_dir = ".";
  oodkit::DetectorParams params;
  int knn_k = 0;
  int vim_dim = 0;
};

int RunFit(const FitOptions& opt) {
  const oodkit::EmbeddingSet train = oodkit::ReadEdsFile(opt.train);
  std::optional<oodkit::ModelHead> head;
  if (!opt.head.empty()) head = oodkit::ReadHeadFile(opt.head);
  oodkit::DetectorParams params = opt.params;
  if (opt.knn_k > 0) params.knn_k = opt.knn_k;
  if (opt.vim_dim > 0) params.vim_dim = opt.vim_dim;
  fs::create_directories(opt.out_dir);
  for (oodkit::DetectorKind kind : oodkit::ParseDetectorList(opt.detectors)) {
    std::vector<std::string> warnings;
    const oodkit::DetectorState state =
        oodkit::Fit(kind, params, train, head ? &*head : nullptr, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    const fs::path path =
        fs::path(opt.out_dir) / (std::string(oodkit::DetectorName(kind)) + ".sta");
    oodkit::WriteStateFile(state, path);
    std::cerr << "wrote " << path.string() << "\n";
  }
  return 0;
}

int RunScore(const std::string& state_path, const std::string& in,
             const std::string& out) {
  const oodkit::DetectorState state = oodkit::ReadStateFile(state_path);
  const std::vector<double> scores =
      oodkit::Score(state, oodkit::ReadEdsFile(in));
  std::string text;
  char buf[64];
  for (double s : scores) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", s);
    text += buf;
  }
  WriteText(text, out);
  return 0;
}

int RunEval(const std::string& config_path, const std::string& out,
            int threads, const std::string& detectors) {
  oodkit::ExperimentConfig config = oodkit::LoadExperimentConfig(config_path);
  if (!detectors.empty()) config.detectors = oodkit::ParseDetectorList(detectors);
  if (threads > 0) config.threads = threads;
  const oodkit::EvalReport report =
      oodkit::RunExperiment(config, oodkit::ResolveThreadCount(config));
  std::string target = out;
  if (target.empty() && config.output_dir) {
    fs::create_directories(*config.output_dir);
    target = (*config.output_dir / "report.json").string();
  }
  WriteText(oodkit::EmitReport(report, oodkit::ReportFormat::kJson), target);
  for (const auto& cell : report.cells) {
    if (!cell.ok()) {
      std::cerr << "failed: " << cell.split << " seed " << cell.seed << " "
                << cell.detector << ": " << cell.failure << "\n";
    }
  }
  for (const auto& run : report.runs) {
    if (!run.ok()) {
      std::cerr << "failed: " << run.split << " seed " << run.seed << ": "
                << run.failure << "\n";
    }
  }
  return report.AllSucceeded() ? 0 : 1;
}

int RunReport(const std::string& in, const std::string& format,
              const std::string& out) {
  const oodkit::EvalReport report = oodkit::ReportFromJson(ReadText(in));
  WriteText(oodkit::EmitReport(report, oodkit::ParseReportFormat(format)), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oodkit: post-hoc OOD detection toolkit"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand(
      "gen-synthetic", "Gaussian-blob embeddings with a matching linear head");
  gen_cmd->add_option("--classes", gen.spec.num_classes, "Number of classes");
  gen_cmd->add_option("--dim", gen.spec.feature_dim, "Feature dimension");
  gen_cmd->add_option("--per-class", gen.spec.per_class,
                      "Samples per class (train samples with --osr-dir)");
  gen_cmd->add_option("--centroid-scale", gen.spec.centroid_scale,
                      "Norm of each class centroid");
  gen_cmd->add_option("--noise", gen.spec.noise_scale, "Per-coordinate noise std");
  gen_cmd->add_option("--seed", gen.spec.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output prefix for <out>.eds and <out>.head");
  gen_cmd->add_option("--osr-dir", gen.osr_dir,
                      "Write a full open-set benchmark (dumps, manifest, eval.json)");
  gen_cmd->add_option("--held-out", gen.held_out, "Held-out classes, comma separated");
  gen_cmd->add_option("--test-per-class", gen.test_per_class, "Test samples per class");
  gen_cmd->add_option("--covariate-per-class", gen.covariate_per_class,
                      "Covariate OOD samples per class");
  gen_cmd->add_option("--covariate-noise", gen.covariate_noise,
                      "Noise std of the covariate OOD set");
  gen_cmd->add_option("--temperature", gen.temperature, "Logit multiplier");
  gen_cmd->add_option("--members", gen.members, "Deep-ensemble member count");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit detectors on ID train embeddings");
  fit_cmd->add_option("--detectors", fit.detectors, "Comma-separated detector names");
  fit_cmd->add_option("--train", fit.train, "ID train .eds")->required();
  fit_cmd->add_option("--head", fit.head, "Classifier head .head");
  fit_cmd->add_option("--out-dir", fit.out_dir, "Directory for <detector>.sta");
  fit_cmd->add_option("--react-q", fit.params.react_percentile, "ReAct percentile");
  fit_cmd->add_option("--knn-k", fit.knn_k, "KNN neighbour rank");
  fit_cmd->add_option("--vim-dim", fit.vim_dim, "ViM principal dimension");
  fit_cmd->add_option("--gen-gamma", fit.params.gen_gamma, "GEN exponent");

  std::string state_path, score_in, score_out;
  auto* score_cmd = app.add_subcommand("score", "Score a dump with a fitted state");
  score_cmd->add_option("--state", state_path, "Fitted .sta file")->required();
  score_cmd->add_option("--in", score_in, "Input .eds")->required();
  score_cmd->add_option("--out", score_out, "Output text file, one score per line");

  std::string config_path, eval_out, eval_detectors;
  int threads = 0;
  auto* eval_cmd = app.add_subcommand("eval", "Run an experiment sweep");
  eval_cmd->add_option("--config", config_path, "Experiment config JSON")->required();
  eval_cmd->add_option("--out", eval_out, "JSON report path");
  eval_cmd->add_option("--threads", threads, "Worker threads");
  eval_cmd->add_option("--detectors", eval_detectors, "Override the detector list");

  std::string report_in, report_format = "md", report_out;
  auto* report_cmd = app.add_subcommand("report", "Render a JSON report");
  report_cmd->add_option("--in", report_in, "JSON report")->required();
  report_cmd->add_option("--format", report_format, "md, csv or json");
  report_cmd->add_option("--out", report_out, "Output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) return RunGen(gen);
    if (*fit_cmd) return RunFit(fit);
    if (*score_cmd) return RunScore(state_path, score_in, score_out);
    if (*eval_cmd) return RunEval(config_path, eval_out, threads, eval_detectors);
    if (*report_cmd) return RunReport(report_in, report_format, report_out);
  } catch (const std::exception& e) {
    std::cerr << "oodkit: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
