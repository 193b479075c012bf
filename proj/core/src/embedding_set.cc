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

#include <string>
#include <utility>

#include "oodkit/error.h"

namespace oodkit {
namespace {

void CheckFinite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kNonFinite, std::string(what) + " contain NaN/Inf");
  }
}

}  // namespace

EmbeddingSet::EmbeddingSet(Matrix features, Matrix logits,
                           std::optional<std::vector<int32_t>> labels,
                           std::optional<std::vector<int32_t>> groups)
    : features_(std::move(features)),
      logits_(std::move(logits)),
      labels_(std::move(labels)),
      groups_(std::move(groups)) {
  if (features_.cols() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "feature dimension must be >= 1");
  }
  if (logits_.cols() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "class count must be >= 2");
  }
  if (features_.rows() != logits_.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "features have " + std::to_string(features_.rows()) +
                    " rows, logits " + std::to_string(logits_.rows()));
  }
  CheckFinite(features_, "features");
  CheckFinite(logits_, "logits");
  const auto n = static_cast<std::size_t>(features_.rows());
  if (labels_) {
    if (labels_->size() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "label count != sample count");
    }
    for (int32_t label : *labels_) {
      if (label < 0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "negative label " + std::to_string(label));
      }
    }
  }
  if (groups_ && groups_->size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "group count != sample count");
  }
}

EmbeddingSet EmbeddingSet::SelectRows(std::span<const std::size_t> rows) const {
  const auto m = static_cast<Eigen::Index>(rows.size());
  Matrix features(m, features_.cols());
  Matrix logits(m, logits_.cols());
  std::optional<std::vector<int32_t>> labels;
  std::optional<std::vector<int32_t>> groups;
  if (labels_) labels.emplace().reserve(rows.size());
  if (groups_) groups.emplace().reserve(rows.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::size_t r = rows[static_cast<std::size_t>(i)];
    if (r >= size()) {
      throw Error(ErrorCode::kInvalidArgument, "row index out of range");
    }
    features.row(i) = features_.row(static_cast<Eigen::Index>(r));
    logits.row(i) = logits_.row(static_cast<Eigen::Index>(r));
    if (labels_) labels->push_back((*labels_)[r]);
    if (groups_) groups->push_back((*groups_)[r]);
  }
  return EmbeddingSet(std::move(features), std::move(logits), std::move(labels),
                      std::move(groups));
}

EmbeddingSet EmbeddingSet::WithLabels(
    std::optional<std::vector<int32_t>> labels) const {
  return EmbeddingSet(features_, logits_, std::move(labels), groups_);
}

EmbeddingSet EmbeddingSet::Concatenate(std::span<const EmbeddingSet> parts) {
  if (parts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "nothing to concatenate");
  }
  const Eigen::Index d = parts.front().features_.cols();
  const Eigen::Index c = parts.front().logits_.cols();
  Eigen::Index total = 0;
  bool all_labels = true;
  bool all_groups = true;
  for (const auto& p : parts) {
    if (p.features_.cols() != d || p.logits_.cols() != c) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "cannot concatenate sets of different shape");
    }
    total += p.features_.rows();
    all_labels = all_labels && p.has_labels();
    all_groups = all_groups && p.has_groups();
  }
  Matrix features(total, d);
  Matrix logits(total, c);
  std::optional<std::vector<int32_t>> labels;
  std::optional<std::vector<int32_t>> groups;
  if (all_labels) labels.emplace().reserve(static_cast<std::size_t>(total));
  if (all_groups) groups.emplace().reserve(static_cast<std::size_t>(total));
  Eigen::Index offset = 0;
  for (const auto& p : parts) {
    const Eigen::Index rows = p.features_.rows();
    features.middleRows(offset, rows) = p.features_;
    logits.middleRows(offset, rows) = p.logits_;
    if (all_labels) {
      labels->insert(labels->end(), p.labels_->begin(), p.labels_->end());
    }
    if (all_groups) {
      groups->insert(groups->end(), p.groups_->begin(), p.groups_->end());
    }
    offset += rows;
  }
  return EmbeddingSet(std::move(features), std::move(logits), std::move(labels),
                      std::move(groups));
}

bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
  return a.features_.rows() == b.features_.rows() &&
         a.features_.cols() == b.features_.cols() &&
         a.logits_.cols() == b.logits_.cols() && a.features_ == b.features_ &&
         a.logits_ == b.logits_ && a.labels_ == b.labels_ &&
         a.groups_ == b.groups_;
}

ModelHead::ModelHead(Matrix weight, Vector bias)
    : weight_(std::move(weight)), bias_(std::move(bias)) {
  if (weight_.rows() < 2 || weight_.cols() < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "head weight must be c x d with c >= 2, d >= 1");
  }
  if (bias_.size() != weight_.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "bias length != class count");
  }
  CheckFinite(weight_, "head weights");
  if (!bias_.allFinite()) {
    throw Error(ErrorCode::kNonFinite, "head bias contains NaN/Inf");
  }
}

Matrix ModelHead::Apply(const Matrix& features) const {
  if (features.cols() != weight_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature dimension does not match head");
  }
  Matrix logits = features * weight_.transpose();
  logits.rowwise() += bias_.transpose();
  return logits;
}

bool operator==(const ModelHead& a, const ModelHead& b) {
  return a.weight_.rows() == b.weight_.rows() &&
         a.weight_.cols() == b.weight_.cols() && a.weight_ == b.weight_ &&
         a.bias_ == b.bias_;
}

std::vector<int32_t> ArgmaxRows(const Matrix& m) {
  std::vector<int32_t> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < m.cols(); ++j) {
      if (m(i, j) > m(i, best)) best = j;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int32_t>(best);
  }
  return out;
}

}  // namespace oodkit
