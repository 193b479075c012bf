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
#include "oodkit/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "oodkit/error.h"

namespace oodkit {
namespace {

constexpr double kTieFractionThreshold = 0.01;
constexpr int kTieShuffles = 10;
constexpr std::uint64_t kTieSeed = 0x7269652d73656564ull;

void CheckFiniteScores(std::span<const double> scores) {
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::kNonFinite, "scores must be finite");
    }
  }
}

// Indices sorted by descending score; equal scores keep their order in
// "base" (the identity unless a tie shuffle is requested).
std::vector<std::size_t> DescendingOrder(std::span<const double> scores,
                                         std::vector<std::size_t> base) {
  std::stable_sort(base.begin(), base.end(),
                   [&scores](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  return base;
}

// Sum over j = 0..N-1 of (m_j + m_{j+1}), the curve's trapezoid area in
// units of 1 / (2 N^2).
std::int64_t CurveArea(const RejectionCurve& curve) {
  std::int64_t area = 0;
  for (std::size_t j = 0; j + 1 < curve.errors.size(); ++j) {
    area += curve.errors[j] + curve.errors[j + 1];
  }
  return area;
}

RejectionCurve CurveForOrder(const std::vector<std::size_t>& order,
                             const std::vector<bool>& correct) {
  RejectionCurve curve;
  curve.num_samples = order.size();
  curve.errors.resize(order.size() + 1);
  std::int64_t errors = static_cast<std::int64_t>(
      std::count(correct.begin(), correct.end(), false));
  curve.errors[0] = errors;
  for (std::size_t j = 0; j < order.size(); ++j) {
    if (!correct[order[j]]) --errors;
    curve.errors[j + 1] = errors;
  }
  return curve;
}

double PrrForOrder(const std::vector<std::size_t>& order,
                   const std::vector<bool>& correct, std::int64_t oracle_gap) {
  const auto n = static_cast<std::int64_t>(correct.size());
  const std::int64_t e = static_cast<std::int64_t>(
      std::count(correct.begin(), correct.end(), false));
  const std::int64_t random_area = e * n;
  const std::int64_t gap = random_area - CurveArea(CurveForOrder(order, correct));
  return 100.0 * (static_cast<double>(gap) / static_cast<double>(oracle_gap));
}

}  // namespace

double Auroc(std::span<const ScoredBinarySample> samples) {
  std::vector<double> scores;
  std::vector<bool> positive;
  scores.reserve(samples.size());
  positive.reserve(samples.size());
  for (const auto& s : samples) {
    scores.push_back(s.score);
    positive.push_back(s.positive);
  }
  return Auroc(scores, positive);
}

double Auroc(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "scores/labels length differ");
  }
  CheckFiniteScores(scores);
  const std::size_t n = scores.size();
  const auto num_pos = static_cast<std::int64_t>(
      std::count(positive.begin(), positive.end(), true));
  const std::int64_t num_neg = static_cast<std::int64_t>(n) - num_pos;
  if (num_pos == 0 || num_neg == 0) {
    throw Error(ErrorCode::kUndefinedMetric,
                "AUROC needs at least one positive and one negative");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Twice the rank sum of positives; a tie block at sorted positions
  // [lo, hi] has mid-rank (lo + hi + 2) / 2 with 1-based ranks.
  std::int64_t twice_rank_sum = 0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi + 1 < n && scores[order[hi + 1]] == scores[order[lo]]) ++hi;
    std::int64_t block_pos = 0;
    for (std::size_t t = lo; t <= hi; ++t) block_pos += positive[order[t]];
    twice_rank_sum += block_pos * static_cast<std::int64_t>(lo + hi + 2);
    lo = hi + 1;
  }
  const std::int64_t twice_u = twice_rank_sum - num_pos * (num_pos + 1);
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(num_pos) * static_cast<double>(num_neg));
}

RejectionCurve BuildRejectionCurve(std::span<const double> scores,
                                   const std::vector<bool>& correct) {
  if (scores.size() != correct.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "scores/labels length differ");
  }
  CheckFiniteScores(scores);
  std::vector<std::size_t> identity(scores.size());
  std::iota(identity.begin(), identity.end(), 0);
  return CurveForOrder(DescendingOrder(scores, std::move(identity)), correct);
}

PrrResult Prr(std::span<const double> scores, const std::vector<bool>& correct) {
  if (scores.size() != correct.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "scores/labels length differ");
  }
  CheckFiniteScores(scores);
  const std::size_t n = scores.size();
  const auto e = static_cast<std::int64_t>(
      std::count(correct.begin(), correct.end(), false));
  if (n < 2 || e == 0 || e == static_cast<std::int64_t>(n)) {
    throw Error(ErrorCode::kUndefinedMetric,
                "PRR needs N >= 2 with at least one error and one correct "
                "prediction (N=" +
                    std::to_string(n) + ", errors=" + std::to_string(e) + ")");
  }
  // Oracle: all errors rejected first.
  std::vector<std::size_t> oracle(n);
  std::iota(oracle.begin(), oracle.end(), 0);
  std::stable_partition(oracle.begin(), oracle.end(),
                        [&correct](std::size_t i) { return !correct[i]; });
  const auto n64 = static_cast<std::int64_t>(n);
  const std::int64_t oracle_gap =
      e * n64 - CurveArea(CurveForOrder(oracle, correct));

  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  PrrResult result;
  result.prr = PrrForOrder(DescendingOrder(scores, identity), correct, oracle_gap);

  std::map<double, std::size_t> multiplicity;
  for (double s : scores) ++multiplicity[s];
  std::size_t tied = 0;
  for (const auto& [value, count] : multiplicity) {
    if (count > 1) tied += count;
  }
  result.tie_fraction = static_cast<double>(tied) / static_cast<double>(n);
  if (result.tie_fraction > kTieFractionThreshold) {
    std::mt19937_64 rng(kTieSeed);
    double sum = 0.0;
    for (int t = 0; t < kTieShuffles; ++t) {
      std::vector<std::size_t> shuffled = identity;
      for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(shuffled[i], shuffled[rng() % (i + 1)]);
      }
      sum += PrrForOrder(DescendingOrder(scores, std::move(shuffled)), correct,
                         oracle_gap);
    }
    result.tie_randomized = sum / kTieShuffles;
  }
  return result;
}

double BalancedAccuracy(std::span<const std::int32_t> predictions,
                        std::span<const std::int32_t> labels,
                        std::optional<int> num_classes) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "predictions/labels length differ");
  }
  if (labels.empty()) {
    throw Error(ErrorCode::kUndefinedMetric, "accuracy of an empty set");
  }
  std::map<std::int32_t, std::pair<std::int64_t, std::int64_t>> tally;
  if (num_classes) {
    for (int k = 0; k < *num_classes; ++k) tally[k] = {0, 0};
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) {
      throw Error(ErrorCode::kInvalidArgument, "negative label");
    }
    if (num_classes && labels[i] >= *num_classes) {
      throw Error(ErrorCode::kInvalidArgument, "label outside class range");
    }
    auto& [hits, count] = tally[labels[i]];
    ++count;
    if (predictions[i] == labels[i]) ++hits;
  }
  double sum = 0.0;
  for (const auto& [cls, t] : tally) {
    if (t.second == 0) {
      throw Error(ErrorCode::kUndefinedMetric,
                  "class " + std::to_string(cls) + " has no samples");
    }
    sum += static_cast<double>(t.first) / static_cast<double>(t.second);
  }
  return 100.0 * sum / static_cast<double>(tally.size());
}

}  // namespace oodkit
