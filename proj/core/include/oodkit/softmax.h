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
#ifndef OODKIT_SOFTMAX_H_
#define OODKIT_SOFTMAX_H_

#include <span>
#include <vector>

#include "oodkit/embedding_set.h"

namespace oodkit {

// Max-subtracted softmax.
std::vector<double> Softmax(std::span<const double> logits);
Matrix SoftmaxRows(const Matrix& logits);

double LogSumExp(std::span<const double> values);
Vector LogSumExpRows(const Matrix& m);

}  // namespace oodkit

#endif  // OODKIT_SOFTMAX_H_
