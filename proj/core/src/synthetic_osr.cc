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
#include "oodkit/synthetic_osr.h"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>
#include "oodkit/eds_io.h"
#include "oodkit/error.h"
#include "oodkit/synthetic.h"

namespace oodkit {
namespace {

namespace fs = std::filesystem;

// Samples around the listed centroid rows; labels are the given class ids.
EmbeddingSet SampleClasses(const Matrix& centroids,
                           const std::vector<std::int32_t>& classes,
                           const ModelHead& head, int per_class, double noise,
                           std::uint64_t seed) {
  Matrix subset(static_cast<Eigen::Index>(classes.size()), centroids.cols());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    subset.row(static_cast<Eigen::Index>(i)) = centroids.row(classes[i]);
  }
  EmbeddingSet sampled =
      SampleAroundCentroids(subset, head, per_class, noise, seed);
  std::vector<std::int32_t> labels = *sampled.labels();
  for (auto& label : labels) label = classes[static_cast<std::size_t>(label)];
  return sampled.WithLabels(std::move(labels));
}

EmbeddingSet Relogit(const EmbeddingSet& set, const ModelHead& head) {
  return EmbeddingSet(set.features(), head.Apply(set.features()), set.labels(),
                      set.groups());
}

}  // namespace

SyntheticOsrData GenerateSyntheticOsr(const SyntheticOsrSpec& spec) {
  const std::set<std::int32_t> held(spec.held_out.begin(), spec.held_out.end());
  std::vector<std::int32_t> id_classes;
  std::vector<std::int32_t> all_classes;
  for (std::int32_t k = 0; k < spec.num_classes; ++k) {
    all_classes.push_back(k);
    if (!held.count(k)) id_classes.push_back(k);
  }
  for (std::int32_t k : held) {
    if (k < 0 || k >= spec.num_classes) {
      throw Error(ErrorCode::kInvalidArgument,
                  "held-out class " + std::to_string(k) + " out of range");
    }
  }
  if (id_classes.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "at least two in-distribution classes are required");
  }
  if (!(spec.head_temperature > 0) || spec.ensemble_members < 0 ||
      !(spec.covariate_noise_scale > 0) || spec.train_per_class < 1 ||
      spec.test_per_class < 1 || spec.covariate_per_class < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid synthetic OSR settings");
  }

  SyntheticSpec base;
  base.num_classes = spec.num_classes;
  base.feature_dim = spec.feature_dim;
  base.per_class = 1;
  base.centroid_scale = spec.centroid_scale;
  base.noise_scale = spec.noise_scale;
  base.seed = spec.seed;
  const SyntheticData blobs = GenerateSynthetic(base);

  const Eigen::Index c = static_cast<Eigen::Index>(id_classes.size());
  Matrix weight(c, spec.feature_dim);
  Vector bias(c);
  for (Eigen::Index k = 0; k < c; ++k) {
    weight.row(k) = blobs.head.weight().row(id_classes[static_cast<std::size_t>(k)]);
    bias(k) = blobs.head.bias()(id_classes[static_cast<std::size_t>(k)]);
  }
  weight *= spec.head_temperature;
  bias *= spec.head_temperature;
  ModelHead head(weight, bias);

  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  SyntheticOsrData data{
      SampleClasses(blobs.centroids, all_classes, head, spec.train_per_class,
                    spec.noise_scale, rng()),
      SampleClasses(blobs.centroids, all_classes, head, spec.test_per_class,
                    spec.noise_scale, rng()),
      SampleClasses(blobs.centroids, id_classes, head, spec.covariate_per_class,
                    spec.covariate_noise_scale, rng()),
      head,
      {},
      {}};

  const double weight_scale =
      weight.cwiseAbs().maxCoeff() * spec.member_weight_noise;
  for (int m = 0; m < spec.ensemble_members; ++m) {
    std::normal_distribution<double> normal(0.0, weight_scale);
    Matrix perturbed = weight;
    for (Eigen::Index i = 0; i < perturbed.rows(); ++i) {
      for (Eigen::Index j = 0; j < perturbed.cols(); ++j) {
        perturbed(i, j) += normal(rng);
      }
    }
    const ModelHead member(std::move(perturbed), bias);
    data.test_members.push_back(Relogit(data.test, member));
    data.covariate_members.push_back(Relogit(data.covariate, member));
  }
  return data;
}

fs::path WriteSyntheticOsr(const SyntheticOsrData& data, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, dir.string() + ": " + ec.message());
  }
  WriteEdsFile(data.train, dir / "train.eds");
  WriteEdsFile(data.test, dir / "test.eds");
  WriteEdsFile(data.covariate, dir / "covariate.eds");
  WriteHeadFile(data.head, dir / "head.head");
  nlohmann::json manifest = {{"id_train", "train.eds"},
                             {"id_test", "test.eds"},
                             {"covariate_ood", {"covariate.eds"}},
                             {"head", "head.head"}};
  if (!data.test_members.empty()) {
    nlohmann::json test_members = nlohmann::json::array();
    nlohmann::json covariate_members = nlohmann::json::array();
    for (std::size_t m = 0; m < data.test_members.size(); ++m) {
      const std::string suffix = "_m" + std::to_string(m) + ".eds";
      WriteEdsFile(data.test_members[m], dir / ("test" + suffix));
      WriteEdsFile(data.covariate_members[m], dir / ("covariate" + suffix));
      test_members.push_back("test" + suffix);
      covariate_members.push_back("covariate" + suffix);
    }
    manifest["id_test_members"] = test_members;
    manifest["covariate_ood_members"] = {covariate_members};
  }
  const fs::path path = dir / "manifest.json";
  std::ofstream out(path);
  out << manifest.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::kIo, path.string() + ": write failed");
  return path;
}

}  // namespace oodkit
