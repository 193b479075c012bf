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
#include "oodkit/embedding_set.h"

#include <limits>

#include <gtest/gtest.h>

#include "oodkit/error.h"
#include "test_util.h"

namespace oodkit {
namespace {

ErrorCode ConstructError(Matrix f, Matrix l,
                         std::optional<std::vector<int32_t>> labels = {}) {
  try {
    EmbeddingSet(std::move(f), std::move(l), std::move(labels));
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "construction succeeded";
  return ErrorCode::kIo;
}

TEST(EmbeddingSetTest, ValidatesShapes) {
  EXPECT_EQ(ConstructError(Matrix(2, 0), Matrix(2, 2)),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(ConstructError(Matrix::Zero(2, 3), Matrix::Zero(2, 1)),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(ConstructError(Matrix::Zero(2, 3), Matrix::Zero(3, 2)),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(ConstructError(Matrix::Zero(2, 3), Matrix::Zero(2, 2),
                           std::vector<int32_t>{0}),
            ErrorCode::kDimensionMismatch);
}

TEST(EmbeddingSetTest, RejectsNonFiniteAndNegativeLabels) {
  Matrix f = Matrix::Zero(1, 2);
  f(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_EQ(ConstructError(f, Matrix::Zero(1, 2)), ErrorCode::kNonFinite);
  EXPECT_EQ(ConstructError(Matrix::Zero(1, 2), Matrix::Zero(1, 2),
                           std::vector<int32_t>{-1}),
            ErrorCode::kInvalidArgument);
}

TEST(EmbeddingSetTest, SelectConcatenateRoundTrip) {
  const EmbeddingSet set = testing::RandomSet(6, 3, 4, true, true, 11);
  const std::vector<std::size_t> head = {0, 1, 2};
  const std::vector<std::size_t> tail = {3, 4, 5};
  const std::vector<EmbeddingSet> parts = {set.SelectRows(head),
                                           set.SelectRows(tail)};
  EXPECT_TRUE(EmbeddingSet::Concatenate(parts) == set);
}

TEST(EmbeddingSetTest, ConcatenateDropsPartialLabels) {
  const std::vector<EmbeddingSet> parts = {
      testing::RandomSet(2, 3, 4, true, false, 1),
      testing::RandomSet(2, 3, 4, false, false, 2)};
  const EmbeddingSet joined = EmbeddingSet::Concatenate(parts);
  EXPECT_EQ(joined.size(), 4u);
  EXPECT_FALSE(joined.has_labels());
}

TEST(EmbeddingSetTest, SelectRowsOutOfRange) {
  const EmbeddingSet set = testing::RandomSet(2, 3, 4, false, false, 1);
  const std::vector<std::size_t> rows = {2};
  EXPECT_THROW(set.SelectRows(rows), Error);
}

TEST(ModelHeadTest, ApplyMatchesManualProduct) {
  Matrix w(2, 3);
  w << 1, 0, -1, 2, 1, 0;
  Vector b(2);
  b << 0.5, -0.5;
  ModelHead head(w, b);
  Matrix f(1, 3);
  f << 1, 2, 3;
  const Matrix logits = head.Apply(f);
  EXPECT_DOUBLE_EQ(logits(0, 0), 1 - 3 + 0.5);
  EXPECT_DOUBLE_EQ(logits(0, 1), 2 + 2 - 0.5);
}

TEST(ArgmaxRowsTest, TiesGoToLowestIndex) {
  Matrix m(2, 3);
  m << 1, 1, 0, 0, 2, 2;
  EXPECT_EQ(ArgmaxRows(m), (std::vector<int32_t>{0, 1}));
}

}  // namespace
}  // namespace oodkit
