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
#include "oodkit/error.h"

namespace oodkit {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid argument";
    case ErrorCode::kBadMagic:
      return "bad magic";
    case ErrorCode::kTruncated:
      return "truncated";
    case ErrorCode::kNonFinite:
      return "non-finite value";
    case ErrorCode::kSizeMismatch:
      return "size mismatch";
    case ErrorCode::kMalformed:
      return "malformed";
    case ErrorCode::kDimensionMismatch:
      return "dimension mismatch";
    case ErrorCode::kMissingInput:
      return "missing input";
    case ErrorCode::kNotPositiveDefinite:
      return "not positive definite";
    case ErrorCode::kZeroResidual:
      return "zero residual";
    case ErrorCode::kUndefinedMetric:
      return "undefined metric";
    case ErrorCode::kConfig:
      return "config error";
    case ErrorCode::kIo:
      return "io error";
  }
  return "unknown";
}

}  // namespace oodkit
