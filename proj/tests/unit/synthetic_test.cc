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

#include <gtest/gtest.h>

#include "oodkit/error.h"
#include "oodkit/synthetic_osr.h"

namespace oodkit {
namespace {

TEST(SyntheticTest, DeterministicForFixedSeed) {
  SyntheticSpec spec;
  spec.seed = 42;
  const SyntheticData a = GenerateSynthetic(spec);
  const SyntheticData b = GenerateSynthetic(spec);
  EXPECT_TRUE(a.set == b.set);
  EXPECT_TRUE(a.head == b.head);
  spec.seed = 43;
  EXPECT_FALSE(GenerateSynthetic(spec).set == a.set);
}

TEST(SyntheticTest, LinearClassifierSeparatesWellSeparatedBlobs) {
  SyntheticSpec spec;
  spec.centroid_scale = 10.0;
  spec.noise_scale = 0.1;
  spec.per_class = 200;
  spec.seed = 3;
  const SyntheticData train = GenerateSynthetic(spec);
  // Nearest-centroid rule estimated on train, applied to fresh samples.
  Matrix estimated = Matrix::Zero(spec.num_classes, spec.feature_dim);
  const auto& labels = *train.set.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    estimated.row(labels[i]) += train.set.features().row(static_cast<Eigen::Index>(i));
  }
  estimated /= spec.per_class;
  const Matrix w = estimated;
  const Vector b = -0.5 * estimated.rowwise().squaredNorm();
  const ModelHead fitted(w, b);
  const EmbeddingSet held_out = SampleAroundCentroids(
      train.centroids, fitted, spec.per_class, spec.noise_scale, 99);
  const auto predicted = ArgmaxRows(held_out.logits());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    correct += predicted[i] == (*held_out.labels())[i];
  }
  EXPECT_GE(static_cast<double>(correct) / predicted.size(), 0.99);
}

TEST(SyntheticTest, SingleSamplePerClass) {
  SyntheticSpec spec;
  spec.num_classes = 2;
  spec.per_class = 1;
  const SyntheticData data = GenerateSynthetic(spec);
  EXPECT_EQ(data.set.size(), 2u);
  EXPECT_EQ(*data.set.labels(), (std::vector<int32_t>{0, 1}));
}

TEST(SyntheticTest, CentroidsAreOrthogonalWithRequestedNorm) {
  SyntheticSpec spec;
  spec.centroid_scale = 7.0;
  const SyntheticData data = GenerateSynthetic(spec);
  const Matrix gram = data.centroids * data.centroids.transpose();
  const Matrix expected =
      49.0 * Matrix::Identity(spec.num_classes, spec.num_classes);
  EXPECT_LT((gram - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SyntheticTest, HeadLogitsMatchStoredLogits) {
  const SyntheticData data = GenerateSynthetic(SyntheticSpec{});
  EXPECT_LT((data.head.Apply(data.set.features()) - data.set.logits())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(SyntheticTest, RejectsDegenerateSpec) {
  SyntheticSpec spec;
  spec.num_classes = 1;
  EXPECT_THROW(GenerateSynthetic(spec), Error);
  spec = SyntheticSpec{};
  spec.noise_scale = 0.0;
  EXPECT_THROW(GenerateSynthetic(spec), Error);
}

TEST(SyntheticOsrTest, HeadCoversOnlyInDistributionClasses) {
  SyntheticOsrSpec spec;
  spec.ensemble_members = 2;
  const SyntheticOsrData data = GenerateSyntheticOsr(spec);
  EXPECT_EQ(data.head.num_classes(), 3u);
  EXPECT_EQ(data.train.num_classes(), 3u);
  EXPECT_EQ(data.train.size(), 5u * 200u);
  for (int32_t label : *data.covariate.labels()) {
    EXPECT_TRUE(label == 0 || label == 1 || label == 2);
  }
  ASSERT_EQ(data.test_members.size(), 2u);
  EXPECT_EQ(data.test_members[1].size(), data.test.size());
  EXPECT_FALSE(data.test_members[0].logits() == data.test.logits());
}

}  // namespace
}  // namespace oodkit
