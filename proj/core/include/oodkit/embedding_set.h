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
#ifndef OODKIT_EMBEDDING_SET_H_
#define OODKIT_EMBEDDING_SET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace oodkit {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// N samples of penultimate features and logits, with optional class labels
// and group tags. Immutable after construction; the constructor enforces:
//   * features is n x d and logits is n x c, d >= 1, c >= 2
//   * every entry is finite
//   * labels (if any) are >= 0 and have length n; groups likewise length n
// An in-memory set may be empty (n == 0); dumps on disk may not.
class EmbeddingSet {
 public:
  EmbeddingSet(Matrix features, Matrix logits,
               std::optional<std::vector<int32_t>> labels = std::nullopt,
               std::optional<std::vector<int32_t>> groups = std::nullopt);

  std::size_t size() const { return static_cast<std::size_t>(features_.rows()); }
  std::size_t feature_dim() const {
    return static_cast<std::size_t>(features_.cols());
  }
  std::size_t num_classes() const {
    return static_cast<std::size_t>(logits_.cols());
  }

  const Matrix& features() const { return features_; }
  const Matrix& logits() const { return logits_; }
  const std::optional<std::vector<int32_t>>& labels() const { return labels_; }
  const std::optional<std::vector<int32_t>>& groups() const { return groups_; }
  bool has_labels() const { return labels_.has_value(); }
  bool has_groups() const { return groups_.has_value(); }

  // Rows in the given order. Indices must be < size().
  EmbeddingSet SelectRows(std::span<const std::size_t> rows) const;

  // Same rows with labels replaced; used to remap label spaces.
  EmbeddingSet WithLabels(std::optional<std::vector<int32_t>> labels) const;

  // Row-wise concatenation. All parts must share d and c; labels/groups are
  // kept only if every part carries them.
  static EmbeddingSet Concatenate(std::span<const EmbeddingSet> parts);

  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b);

 private:
  Matrix features_;
  Matrix logits_;
  std::optional<std::vector<int32_t>> labels_;
  std::optional<std::vector<int32_t>> groups_;
};

// Last linear layer: logits = weight * f + bias, weight is c x d.
class ModelHead {
 public:
  ModelHead(Matrix weight, Vector bias);

  std::size_t num_classes() const {
    return static_cast<std::size_t>(weight_.rows());
  }
  std::size_t feature_dim() const {
    return static_cast<std::size_t>(weight_.cols());
  }
  const Matrix& weight() const { return weight_; }
  const Vector& bias() const { return bias_; }

  // n x c logits for n x d features.
  Matrix Apply(const Matrix& features) const;

  friend bool operator==(const ModelHead& a, const ModelHead& b);

 private:
  Matrix weight_;
  Vector bias_;
};

// Row-wise argmax; ties resolve to the lowest index.
std::vector<int32_t> ArgmaxRows(const Matrix& m);

}  // namespace oodkit

#endif  // OODKIT_EMBEDDING_SET_H_
