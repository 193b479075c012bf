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
#include "oodkit/eds_io.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

#include "byte_codec.h"
#include "oodkit/error.h"

namespace oodkit {
namespace {

using internal::ByteReader;
using internal::ByteWriter;

void CheckMagic(std::span<const std::byte> got, const char (&want)[8]) {
  if (std::memcmp(got.data(), want, 8) != 0) {
    throw Error(ErrorCode::kBadMagic,
                "expected \"" + std::string(want, 8) + "\"");
  }
}

void WriteF32Matrix(ByteWriter& w, const Matrix& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      w.F32(internal::NarrowToF32(m(i, j), what));
    }
  }
}

Matrix ReadF32Matrix(ByteReader& r, std::uint32_t rows, std::uint32_t cols,
                     const char* what) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = internal::CheckedFinite(r.F32(what), what);
    }
  }
  return m;
}

std::size_t Emit(std::span<const std::byte> bytes, std::ostream& sink) {
  sink.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw Error(ErrorCode::kIo, "write to sink failed");
  return bytes.size();
}

}  // namespace

std::uint64_t EdsEncodedSize(std::uint64_t n, std::uint64_t d, std::uint64_t c,
                             bool labels, bool groups) {
  // u32 header fields keep every product below 2^66; saturate instead of
  // wrapping so a hostile header can never look small.
  const internal::Uint128 size =
      static_cast<internal::Uint128>(kEdsHeaderSize) +
      static_cast<internal::Uint128>(4) * n * (d + c + (labels ? 1 : 0) +
                                               (groups ? 1 : 0));
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  return size > kMax ? kMax : static_cast<std::uint64_t>(size);
}

std::vector<std::byte> EncodeEds(const EmbeddingSet& set) {
  if (set.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "a dump needs at least one sample");
  }
  const auto n = static_cast<std::uint32_t>(set.size());
  const auto d = static_cast<std::uint32_t>(set.feature_dim());
  const auto c = static_cast<std::uint32_t>(set.num_classes());
  ByteWriter w;
  w.Reserve(static_cast<std::size_t>(
      EdsEncodedSize(n, d, c, set.has_labels(), set.has_groups())));
  w.Raw(kEdsMagic, 8);
  w.U32(n);
  w.U32(d);
  w.U32(c);
  std::uint8_t flags = 0;
  if (set.has_labels()) flags |= kEdsFlagLabels;
  if (set.has_groups()) flags |= kEdsFlagGroups;
  w.U8(flags);
  w.U8(0);
  w.U8(0);
  w.U8(0);
  WriteF32Matrix(w, set.features(), "feature");
  WriteF32Matrix(w, set.logits(), "logit");
  if (set.has_labels()) {
    for (int32_t v : *set.labels()) w.I32(v);
  }
  if (set.has_groups()) {
    for (int32_t v : *set.groups()) w.I32(v);
  }
  return w.Take();
}

std::size_t WriteEds(const EmbeddingSet& set, std::ostream& sink) {
  return Emit(EncodeEds(set), sink);
}

EmbeddingSet DecodeEds(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  r.Require(8, "magic");
  CheckMagic(r.Raw(8, "magic"), kEdsMagic);
  const std::uint32_t n = r.U32("header");
  const std::uint32_t d = r.U32("header");
  const std::uint32_t c = r.U32("header");
  const std::uint8_t flags = r.U8("header");
  auto reserved = r.Raw(3, "header");
  if (std::any_of(reserved.begin(), reserved.end(),
                  [](std::byte b) { return b != std::byte{0}; })) {
    throw Error(ErrorCode::kMalformed, "reserved header bytes are not zero");
  }
  if ((flags & ~(kEdsFlagLabels | kEdsFlagGroups)) != 0) {
    throw Error(ErrorCode::kMalformed, "unknown flag bits");
  }
  if (n == 0 || d == 0 || c < 2) {
    throw Error(ErrorCode::kMalformed, "header requires n >= 1, d >= 1, c >= 2");
  }
  const bool has_labels = flags & kEdsFlagLabels;
  const bool has_groups = flags & kEdsFlagGroups;
  const std::uint64_t expected =
      EdsEncodedSize(n, d, c, has_labels, has_groups);
  if (bytes.size() < expected) {
    throw Error(ErrorCode::kTruncated,
                "header declares " + std::to_string(expected) +
                    " bytes, stream has " + std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::kSizeMismatch,
                std::to_string(bytes.size() - expected) +
                    " trailing bytes after payload");
  }
  Matrix features = ReadF32Matrix(r, n, d, "feature");
  Matrix logits = ReadF32Matrix(r, n, c, "logit");
  std::optional<std::vector<int32_t>> labels;
  std::optional<std::vector<int32_t>> groups;
  if (has_labels) {
    std::vector<int32_t> v(n);
    for (auto& x : v) x = r.I32("labels");
    const bool all_unlabeled =
        std::all_of(v.begin(), v.end(), [](int32_t x) { return x == -1; });
    if (!all_unlabeled) {
      if (std::any_of(v.begin(), v.end(), [](int32_t x) { return x < 0; })) {
        throw Error(ErrorCode::kMalformed, "negative label in labeled dump");
      }
      labels = std::move(v);
    }
  }
  if (has_groups) {
    std::vector<int32_t> v(n);
    for (auto& x : v) x = r.I32("groups");
    groups = std::move(v);
  }
  return EmbeddingSet(std::move(features), std::move(logits), std::move(labels),
                      std::move(groups));
}

EmbeddingSet ReadEds(std::istream& source) {
  return DecodeEds(ReadAllBytes(source));
}

std::vector<std::byte> EncodeHead(const ModelHead& head) {
  ByteWriter w;
  w.Raw(kHeadMagic, 8);
  w.U32(static_cast<std::uint32_t>(head.num_classes()));
  w.U32(static_cast<std::uint32_t>(head.feature_dim()));
  WriteF32Matrix(w, head.weight(), "head weight");
  for (Eigen::Index i = 0; i < head.bias().size(); ++i) {
    w.F32(internal::NarrowToF32(head.bias()(i), "head bias"));
  }
  return w.Take();
}

std::size_t WriteHead(const ModelHead& head, std::ostream& sink) {
  return Emit(EncodeHead(head), sink);
}

ModelHead DecodeHead(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  r.Require(8, "magic");
  CheckMagic(r.Raw(8, "magic"), kHeadMagic);
  const std::uint32_t c = r.U32("header");
  const std::uint32_t d = r.U32("header");
  if (c < 2 || d == 0) {
    throw Error(ErrorCode::kMalformed, "head requires c >= 2, d >= 1");
  }
  const internal::Uint128 expected =
      kHeadHeaderSize + static_cast<internal::Uint128>(4) * c * (d + 1ull);
  if (bytes.size() < expected) {
    throw Error(ErrorCode::kTruncated,
                "head header declares more bytes than the stream holds");
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::kSizeMismatch, "trailing bytes after head payload");
  }
  Matrix weight = ReadF32Matrix(r, c, d, "head weight");
  Vector bias(c);
  for (Eigen::Index i = 0; i < bias.size(); ++i) {
    bias(i) = internal::CheckedFinite(r.F32("head bias"), "head bias");
  }
  return ModelHead(std::move(weight), std::move(bias));
}

ModelHead ReadHead(std::istream& source) {
  return DecodeHead(ReadAllBytes(source));
}

std::vector<std::byte> ReadAllBytes(std::istream& source) {
  std::vector<std::byte> out;
  char buffer[1 << 16];
  while (source) {
    source.read(buffer, sizeof(buffer));
    const auto got = static_cast<std::size_t>(source.gcount());
    const auto* p = reinterpret_cast<const std::byte*>(buffer);
    out.insert(out.end(), p, p + got);
  }
  if (source.bad()) throw Error(ErrorCode::kIo, "read from source failed");
  return out;
}

std::vector<std::byte> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ReadAllBytes(in);
}

void WriteFileBytes(std::span<const std::byte> bytes,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path.string());
  Emit(bytes, out);
}

EmbeddingSet ReadEdsFile(const std::filesystem::path& path) {
  try {
    return DecodeEds(ReadFileBytes(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

void WriteEdsFile(const EmbeddingSet& set, const std::filesystem::path& path) {
  WriteFileBytes(EncodeEds(set), path);
}

ModelHead ReadHeadFile(const std::filesystem::path& path) {
  try {
    return DecodeHead(ReadFileBytes(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

void WriteHeadFile(const ModelHead& head, const std::filesystem::path& path) {
  WriteFileBytes(EncodeHead(head), path);
}

}  // namespace oodkit
