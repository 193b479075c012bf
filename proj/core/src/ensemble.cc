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
#include "oodkit/ensemble.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "oodkit/error.h"
#include "oodkit/softmax.h"

namespace oodkit {
namespace {

constexpr double kSimplexTolerance = 1e-9;

std::span<const double> RowSpan(const Matrix& m, Eigen::Index i) {
  return {m.row(i).data(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

EnsembleBatch::EnsembleBatch(std::vector<Matrix> member_probs)
    : members_(std::move(member_probs)) {
  if (members_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ensemble needs >= 1 member");
  }
  const Eigen::Index n = members_[0].rows();
  const Eigen::Index c = members_[0].cols();
  if (c < 1) throw Error(ErrorCode::kInvalidArgument, "no classes");
  for (std::size_t m = 0; m < members_.size(); ++m) {
    const Matrix& p = members_[m];
    if (p.rows() != n || p.cols() != c) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "member " + std::to_string(m) + " has a different shape");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < c; ++j) {
        if (!(p(i, j) >= 0.0) || !std::isfinite(p(i, j))) {
          throw Error(ErrorCode::kInvalidArgument,
                      "member probabilities must be finite and >= 0");
        }
        sum += p(i, j);
      }
      if (std::fabs(sum - 1.0) > kSimplexTolerance) {
        throw Error(ErrorCode::kInvalidArgument,
                    "member probability row does not sum to 1");
      }
    }
  }
}

EnsembleBatch EnsembleBatch::FromMemberLogits(
    std::span<const EmbeddingSet> members) {
  std::vector<Matrix> probs;
  probs.reserve(members.size());
  for (const auto& m : members) probs.push_back(SoftmaxRows(m.logits()));
  return EnsembleBatch(std::move(probs));
}

EnsembleAverage DeAverage(const EnsembleBatch& batch) {
  Matrix mean = batch.members()[0];
  for (std::size_t m = 1; m < batch.num_members(); ++m) {
    mean += batch.members()[m];
  }
  mean /= static_cast<double>(batch.num_members());
  auto predictions = ArgmaxRows(mean);
  return EnsembleAverage{std::move(mean), std::move(predictions)};
}

double Entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

std::vector<double> TotalUncertainty(const EnsembleBatch& batch) {
  const Matrix mean = DeAverage(batch).mean_probs;
  std::vector<double> out(batch.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = Entropy(RowSpan(mean, static_cast<Eigen::Index>(i)));
  }
  return out;
}

std::vector<double> EpistemicUncertainty(const EnsembleBatch& batch) {
  std::vector<double> out = TotalUncertainty(batch);
  const double inv_m = 1.0 / static_cast<double>(batch.num_members());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double expected = 0.0;
    for (const Matrix& p : batch.members()) {
      expected += Entropy(RowSpan(p, static_cast<Eigen::Index>(i)));
    }
    out[i] = std::max(0.0, out[i] - expected * inv_m);
  }
  return out;
}

}  // namespace oodkit
