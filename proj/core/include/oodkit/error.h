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
#ifndef OODKIT_ERROR_H_
#define OODKIT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace oodkit {

enum class ErrorCode {
  kInvalidArgument,
  kBadMagic,
  kTruncated,
  kNonFinite,
  kSizeMismatch,
  kMalformed,
  kDimensionMismatch,
  kMissingInput,
  kNotPositiveDefinite,
  kZeroResidual,
  kUndefinedMetric,
  kConfig,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library is an Error; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const { return code_; }
  // The message without the code prefix.
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace oodkit

#endif  // OODKIT_ERROR_H_
