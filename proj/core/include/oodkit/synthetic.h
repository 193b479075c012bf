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
#ifndef OODKIT_SYNTHETIC_H_
#define OODKIT_SYNTHETIC_H_

#include <cstdint>

#include "oodkit/embedding_set.h"

namespace oodkit {

struct SyntheticSpec {
  int num_classes = 5;
  int feature_dim = 16;
  int per_class = 100;
  double centroid_scale = 10.0;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  EmbeddingSet set;
  ModelHead head;
  // num_classes x feature_dim class means.
  Matrix centroids;
};

// Isotropic Gaussian blobs around class centroids of norm centroid_scale.
// When feature_dim >= num_classes the centroids are mutually orthogonal,
// otherwise they are random unit directions. Rows are class-major and labels
// are the class indices. The head scores classes by their centroid:
//   logit_k = (mu_k . f - |mu_k|^2 / 2) / centroid_scale^2
// Deterministic in `spec` (including its seed).
SyntheticData GenerateSynthetic(const SyntheticSpec& spec);

// Fresh samples around given centroids, class-major, labels 0..k-1.
// Logits are head.Apply(features).
EmbeddingSet SampleAroundCentroids(const Matrix& centroids,
                                   const ModelHead& head, int per_class,
                                   double noise_scale, std::uint64_t seed);

}  // namespace oodkit

#endif  // OODKIT_SYNTHETIC_H_
