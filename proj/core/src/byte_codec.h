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
#ifndef OODKIT_SRC_BYTE_CODEC_H_
#define OODKIT_SRC_BYTE_CODEC_H_

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "oodkit/error.h"

namespace oodkit::internal {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

// Wide enough for size arithmetic on any u32 header without wrapping.
__extension__ typedef unsigned __int128 Uint128;

template <typename T>
T ToLittle(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<std::byte, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return v;
  }
}

class ByteWriter {
 public:
  void Raw(const void* data, std::size_t size) {
    const auto* p = static_cast<const std::byte*>(data);
    out_.insert(out_.end(), p, p + size);
  }
  void U8(std::uint8_t v) { out_.push_back(static_cast<std::byte>(v)); }
  void U32(std::uint32_t v) { Put(ToLittle(v)); }
  void I32(std::int32_t v) { Put(ToLittle(v)); }
  void F32(float v) { Put(ToLittle(std::bit_cast<std::uint32_t>(v))); }
  void F64(double v) { Put(ToLittle(std::bit_cast<std::uint64_t>(v))); }

  void Reserve(std::size_t n) { out_.reserve(n); }
  std::vector<std::byte> Take() { return std::move(out_); }
  std::size_t size() const { return out_.size(); }

 private:
  template <typename T>
  void Put(T v) {
    Raw(&v, sizeof(T));
  }
  std::vector<std::byte> out_;
};

// Bounds-checked cursor; every overrun is an Error(kTruncated).
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  void Require(std::uint64_t n, const char* what) const {
    if (n > remaining()) {
      throw Error(ErrorCode::kTruncated,
                  std::string(what) + ": need " + std::to_string(n) +
                      " bytes, " + std::to_string(remaining()) + " left");
    }
  }

  std::span<const std::byte> Raw(std::size_t n, const char* what) {
    Require(n, what);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t U8(const char* what) {
    return static_cast<std::uint8_t>(Raw(1, what)[0]);
  }
  std::uint32_t U32(const char* what) { return Get<std::uint32_t>(what); }
  std::int32_t I32(const char* what) { return Get<std::int32_t>(what); }
  float F32(const char* what) {
    return std::bit_cast<float>(Get<std::uint32_t>(what));
  }
  double F64(const char* what) {
    return std::bit_cast<double>(Get<std::uint64_t>(what));
  }

 private:
  template <typename T>
  T Get(const char* what) {
    auto raw = Raw(sizeof(T), what);
    T v;
    std::memcpy(&v, raw.data(), sizeof(T));
    return ToLittle(v);
  }

  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

// Narrowing with a range check: values that would overflow binary32 are
// rejected rather than silently written as Inf.
inline float NarrowToF32(double v, const char* what) {
  if (!std::isfinite(v) ||
      std::fabs(v) > static_cast<double>(std::numeric_limits<float>::max())) {
    throw Error(ErrorCode::kNonFinite,
                std::string(what) + " value not representable as binary32");
  }
  return static_cast<float>(v);
}

inline double CheckedFinite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kNonFinite, std::string(what) + " contains NaN/Inf");
  }
  return v;
}

}  // namespace oodkit::internal

#endif  // OODKIT_SRC_BYTE_CODEC_H_
