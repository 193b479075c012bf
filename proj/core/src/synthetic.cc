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
#include "oodkit/synthetic.h"

#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/QR>

#include "oodkit/error.h"

namespace oodkit {
namespace {

void CheckSpec(const SyntheticSpec& spec) {
  if (spec.num_classes < 2 || spec.feature_dim < 1 || spec.per_class < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "synthetic data needs classes >= 2, dim >= 1, per-class >= 1");
  }
  if (!(spec.centroid_scale > 0) || !(spec.noise_scale > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic scales must be > 0");
  }
}

Matrix DrawCentroids(int classes, int dim, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix raw(dim, classes);
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    for (Eigen::Index j = 0; j < raw.cols(); ++j) raw(i, j) = normal(rng);
  }
  Matrix directions(dim, classes);
  if (dim >= classes) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    directions = qr.householderQ() * Eigen::MatrixXd::Identity(dim, classes);
  } else {
    directions = raw;
    for (Eigen::Index j = 0; j < directions.cols(); ++j) {
      directions.col(j).normalize();
    }
  }
  return scale * directions.transpose();
}

}  // namespace

EmbeddingSet SampleAroundCentroids(const Matrix& centroids,
                                   const ModelHead& head, int per_class,
                                   double noise_scale, std::uint64_t seed) {
  if (per_class < 1 || !(noise_scale > 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "per-class count and noise scale must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, noise_scale);
  const Eigen::Index classes = centroids.rows();
  const Eigen::Index dim = centroids.cols();
  Matrix features(classes * per_class, dim);
  std::vector<int32_t> labels;
  labels.reserve(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index k = 0; k < classes; ++k) {
    for (int s = 0; s < per_class; ++s) {
      const Eigen::Index row = k * per_class + s;
      for (Eigen::Index j = 0; j < dim; ++j) {
        features(row, j) = centroids(k, j) + normal(rng);
      }
      labels.push_back(static_cast<int32_t>(k));
    }
  }
  Matrix logits = head.Apply(features);
  return EmbeddingSet(std::move(features), std::move(logits), std::move(labels));
}

SyntheticData GenerateSynthetic(const SyntheticSpec& spec) {
  CheckSpec(spec);
  std::mt19937_64 rng(spec.seed);
  Matrix centroids = DrawCentroids(spec.num_classes, spec.feature_dim,
                                   spec.centroid_scale, rng);
  const double inv_scale2 = 1.0 / (spec.centroid_scale * spec.centroid_scale);
  Matrix weight = centroids * inv_scale2;
  Vector bias = -0.5 * inv_scale2 * centroids.rowwise().squaredNorm();
  ModelHead head(std::move(weight), std::move(bias));
  // Sample stream is seeded from the same generator so one seed fixes all.
  EmbeddingSet set = SampleAroundCentroids(centroids, head, spec.per_class,
                                           spec.noise_scale, rng());
  return SyntheticData{std::move(set), std::move(head), std::move(centroids)};
}

}  // namespace oodkit
