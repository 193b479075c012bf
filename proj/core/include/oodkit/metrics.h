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
#ifndef OODKIT_METRICS_H_
#define OODKIT_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace oodkit {

struct ScoredBinarySample {
  double score = 0.0;     // higher = more OOD / more uncertain
  bool positive = false;  // OOD for AUROC, misclassified for PRR
};

// Mann-Whitney estimate of P(score_pos > score_neg) with ties counted 1/2,
// computed from mid-ranks in O(N log N). Throws kUndefinedMetric unless at
// least one positive and one negative are present.
double Auroc(std::span<const ScoredBinarySample> samples);
double Auroc(std::span<const double> scores, const std::vector<bool>& positive);

// Rejection curve over fractions j/N, j = 0..N: the j highest-score samples
// are handed off and counted correct; errors[j] is the number of mistakes
// left among the retained samples.
struct RejectionCurve {
  std::size_t num_samples = 0;
  std::vector<std::int64_t> errors;  // N + 1 entries, errors.back() == 0

  double ErrorRate(std::size_t j) const {
    return static_cast<double>(errors[j]) / static_cast<double>(num_samples);
  }
};

// Order is a stable descending sort by score (input order on ties).
RejectionCurve BuildRejectionCurve(std::span<const double> scores,
                                   const std::vector<bool>& correct);

struct PrrResult {
  double prr = 0.0;  // percent
  // Set when tied scores cover more than 1% of samples: PRR averaged over 10
  // random tie orderings (fixed seed).
  std::optional<double> tie_randomized;
  double tie_fraction = 0.0;
};

// Prediction rejection ratio, in percent: 100 * AR_score / AR_oracle where
// AR is the trapezoid area between the random-rejection line and a curve.
// Areas are accumulated in exact integer units, so the oracle ordering gives
// exactly 100 and the reversed oracle exactly -100. Throws kUndefinedMetric
// for N < 2 or when every prediction is correct or every one is wrong.
PrrResult Prr(std::span<const double> scores, const std::vector<bool>& correct);

// Mean per-class recall in percent over the classes present in labels, or
// over [0, num_classes) when given (every class must then occur).
double BalancedAccuracy(std::span<const std::int32_t> predictions,
                        std::span<const std::int32_t> labels,
                        std::optional<int> num_classes = std::nullopt);

}  // namespace oodkit

#endif  // OODKIT_METRICS_H_
