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
#ifndef OODKIT_SYNTHETIC_OSR_H_
#define OODKIT_SYNTHETIC_OSR_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "oodkit/embedding_set.h"

namespace oodkit {

// A complete open-set benchmark built from Gaussian blobs. The classifier
// head only knows the in-distribution classes (all classes minus held_out);
// every dump carries that head's logits.
struct SyntheticOsrSpec {
  int num_classes = 5;
  std::vector<std::int32_t> held_out = {3, 4};
  int feature_dim = 16;
  int train_per_class = 200;
  int test_per_class = 100;
  int covariate_per_class = 200;
  double centroid_scale = 10.0;
  double noise_scale = 1.0;
  // Covariate OOD: in-distribution classes resampled with this noise.
  double covariate_noise_scale = 5.0;
  // Logits are multiplied by this; values far from 1 miscalibrate the head.
  double head_temperature = 1.0;
  // Deep-ensemble members: copies of the head with perturbed weights.
  int ensemble_members = 0;
  double member_weight_noise = 0.05;
  std::uint64_t seed = 0;
};

struct SyntheticOsrData {
  // train and test hold every class; labels are the original class ids.
  EmbeddingSet train;
  EmbeddingSet test;
  // In-distribution classes only, original class ids.
  EmbeddingSet covariate;
  // Logit k belongs to the k-th smallest in-distribution class id.
  ModelHead head;
  std::vector<EmbeddingSet> test_members;
  std::vector<EmbeddingSet> covariate_members;
};

SyntheticOsrData GenerateSyntheticOsr(const SyntheticOsrSpec& spec);

// Writes train.eds, test.eds, covariate.eds, head.head, member dumps and
// manifest.json into dir (created if missing). Returns the manifest path.
std::filesystem::path WriteSyntheticOsr(const SyntheticOsrData& data,
                                        const std::filesystem::path& dir);

}  // namespace oodkit

#endif  // OODKIT_SYNTHETIC_OSR_H_
