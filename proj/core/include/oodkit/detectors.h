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
#ifndef OODKIT_DETECTORS_H_
#define OODKIT_DETECTORS_H_

// Post-hoc OOD scoring functions over classifier features, logits and
// probabilities. Every detector follows one lifecycle:
//
//   DetectorState state = Fit(kind, params, id_train, &head);
//   std::vector<double> scores = Score(state, batch);
//
// and one orientation: a HIGHER score means MORE out-of-distribution.
// Detectors whose native quantity is an in-distribution confidence (max
// softmax probability, max logit, gradient norm, energy) are negated.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "oodkit/embedding_set.h"

namespace oodkit {

enum class DetectorKind {
  kMsp,
  kMaha,
  kReactEnergy,
  kGradNorm,
  kMls,
  kKlm,
  kKnn,
  kVim,
  kGen,
};

inline constexpr DetectorKind kAllDetectors[] = {
    DetectorKind::kMsp, DetectorKind::kMaha, DetectorKind::kReactEnergy,
    DetectorKind::kGradNorm, DetectorKind::kMls, DetectorKind::kKlm,
    DetectorKind::kKnn, DetectorKind::kVim, DetectorKind::kGen};

// Lower-case CLI name: msp, maha, react, gradnorm, mls, klm, knn, vim, gen.
std::string_view DetectorName(DetectorKind kind);
// Accepts the CLI names plus the short table names (r+e, grn).
DetectorKind ParseDetectorKind(std::string_view name);
// "msp,maha,vim" -> kinds, in order; duplicates are rejected.
std::vector<DetectorKind> ParseDetectorList(std::string_view csv);

bool NeedsHead(DetectorKind kind);

struct DetectorParams {
  // ReAct clamp percentile of the pooled train activations, in (0, 100].
  double react_percentile = 98.0;
  // Neighbour rank; unset means round(2.5 * c).
  std::optional<int> knn_k;
  // Principal subspace dimension; unset means round(d / 2). Always clamped
  // to [1, d - 1].
  std::optional<int> vim_dim;
  // Generalized-entropy exponent, in (0, 1). All classes are summed.
  double gen_gamma = 0.1;
};

int ResolveKnnK(const DetectorParams& params, std::size_t num_classes);
int ResolveVimDim(const DetectorParams& params, std::size_t feature_dim);

// Linear-interpolated percentile (q in [0, 100]) of the values; q = 100 is
// the maximum.
double Percentile(std::vector<double> values, double q);

// Fitted payloads. Each is validated by the DetectorState constructor.

struct MahaState {
  // Class index of each centroid row (classes absent from train are skipped).
  std::vector<int32_t> classes;
  Matrix centroids;  // k x d
  // Lower Cholesky factor L of the regularised tied covariance, L L^T = S.
  Matrix cholesky;  // d x d

  // Factors the given covariance (no regularisation is added).
  static MahaState FromCovariance(std::vector<int32_t> classes,
                                  Matrix centroids, const Matrix& covariance);
};

struct ReactState {
  double clamp = 0.0;
  ModelHead head;
};

struct KlmState {
  Matrix templates;  // c x c, row k = mean train softmax for predicted class k
};

struct KnnState {
  Matrix bank;  // n x d, unit rows
  int k = 1;
};

struct VimState {
  Vector offset;         // d
  Matrix residual_basis; // d x (d - D), orthonormal columns
  double alpha = 1.0;
  ModelHead head;
};

struct GenState {
  double gamma = 0.1;
};

using DetectorPayload = std::variant<std::monostate, MahaState, ReactState,
                                     KlmState, KnnState, VimState, GenState>;

class DetectorState {
 public:
  // Throws Error(kMalformed) if the payload does not belong to the kind or
  // breaks its invariants.
  DetectorState(DetectorKind kind, DetectorPayload payload);

  DetectorKind kind() const { return kind_; }
  const DetectorPayload& payload() const { return payload_; }

  template <typename T>
  const T& get() const {
    return std::get<T>(payload_);
  }

  // Dimensions the state pins down; nullopt when any value is accepted.
  std::optional<std::size_t> feature_dim() const;
  std::optional<std::size_t> num_classes() const;

 private:
  DetectorKind kind_;
  DetectorPayload payload_;
};

// Fits a detector on in-distribution training embeddings. head is required
// for kReactEnergy and kVim, train labels for kMaha. Non-fatal findings (such
// as stored logits disagreeing with the head) are appended to warnings.
DetectorState Fit(DetectorKind kind, const DetectorParams& params,
                  const EmbeddingSet& train, const ModelHead* head = nullptr,
                  std::vector<std::string>* warnings = nullptr);

// One score per batch row, higher = more OOD.
std::vector<double> Score(const DetectorState& state, const EmbeddingSet& batch);

// Softmax probability of the virtual logit alpha * |R^T (f - o)| appended to
// the class logits. Strictly increasing in the kVim score, so it ranks
// samples identically.
std::vector<double> VimVirtualProbability(const VimState& state,
                                          const EmbeddingSet& batch);

// Largest |stored logit - head(f)| over the first max_rows rows.
double MaxLogitDiscrepancy(const EmbeddingSet& set, const ModelHead& head,
                           std::size_t max_rows = 256);

}  // namespace oodkit

#endif  // OODKIT_DETECTORS_H_
