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
#include "oodkit/softmax.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.h"

namespace oodkit {
namespace {

TEST(SoftmaxTest, SymmetricInputIsUniform) {
  const auto p = Softmax(std::vector<double>{0.0, 0.0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(SoftmaxTest, LargeLogitDoesNotOverflow) {
  const auto p = Softmax(std::vector<double>{1000.0, 0.0});
  EXPECT_TRUE(std::isfinite(p[0]) && std::isfinite(p[1]));
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_NEAR(p[1], 0.0, 1e-15);
  EXPECT_NEAR(LogSumExp(std::vector<double>{1000.0, 1000.0}),
              1000.0 + std::log(2.0), 1e-12);
}

TEST(SoftmaxTest, MatchesExtendedPrecisionOracle) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> logits(5);
    for (double& v : logits) v = normal(rng);
    const auto p = Softmax(logits);
    const auto expected = oodkit_oracle::Softmax(logits);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(p[j], expected[j], 1e-12);
    EXPECT_NEAR(LogSumExp(logits),
                static_cast<double>(oodkit_oracle::LogSumExp(logits)), 1e-12);
  }
}

TEST(SoftmaxTest, RowsAgreeWithScalarVersion) {
  const EmbeddingSet set = testing::RandomSet(7, 2, 4, false, false, 8);
  const Matrix probs = SoftmaxRows(set.logits());
  const Vector lse = LogSumExpRows(set.logits());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const Vector row = set.logits().row(i).transpose();
    const auto p = Softmax(std::span<const double>(row.data(), row.size()));
    for (Eigen::Index j = 0; j < probs.cols(); ++j) {
      EXPECT_DOUBLE_EQ(probs(i, j), p[static_cast<std::size_t>(j)]);
    }
    EXPECT_DOUBLE_EQ(lse(i),
                     LogSumExp(std::span<const double>(row.data(), row.size())));
    EXPECT_NEAR(probs.row(i).sum(), 1.0, 1e-15);
  }
}

}  // namespace
}  // namespace oodkit
