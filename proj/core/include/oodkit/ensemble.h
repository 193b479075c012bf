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
#ifndef OODKIT_ENSEMBLE_H_
#define OODKIT_ENSEMBLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "oodkit/embedding_set.h"

namespace oodkit {

// Probability outputs of M ensemble members for the same N samples.
// Invariants (checked on construction): M >= 1, every member is N x c with
// the same N and c, entries >= 0 and each row sums to 1 within 1e-9.
class EnsembleBatch {
 public:
  explicit EnsembleBatch(std::vector<Matrix> member_probs);

  // Softmax of each member dump's logits.
  static EnsembleBatch FromMemberLogits(std::span<const EmbeddingSet> members);

  std::size_t num_members() const { return members_.size(); }
  std::size_t size() const { return static_cast<std::size_t>(members_[0].rows()); }
  std::size_t num_classes() const {
    return static_cast<std::size_t>(members_[0].cols());
  }
  const std::vector<Matrix>& members() const { return members_; }

 private:
  std::vector<Matrix> members_;
};

struct EnsembleAverage {
  Matrix mean_probs;                // N x c
  std::vector<int32_t> predictions; // argmax, lowest index on ties
};

EnsembleAverage DeAverage(const EnsembleBatch& batch);

// Shannon entropy (nats) of the member-averaged probabilities.
std::vector<double> TotalUncertainty(const EnsembleBatch& batch);

// Mutual information: H(mean p) - mean_m H(p_m), negative rounding clamped to 0.
std::vector<double> EpistemicUncertainty(const EnsembleBatch& batch);

// -sum p ln p with 0 ln 0 = 0.
double Entropy(std::span<const double> p);

}  // namespace oodkit

#endif  // OODKIT_ENSEMBLE_H_
