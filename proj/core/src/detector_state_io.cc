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
#include "oodkit/detector_state_io.h"

#include <algorithm>
#include <cstring>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "byte_codec.h"
#include "oodkit/eds_io.h"
#include "oodkit/error.h"

namespace oodkit {
namespace {

using internal::ByteReader;
using internal::ByteWriter;

enum class ElementType : std::uint8_t { kF32 = 1, kF64 = 2, kI32 = 3 };

constexpr std::uint32_t kMaxKind = static_cast<std::uint32_t>(DetectorKind::kGen);

struct Entry {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Matrix reals;
  std::vector<int32_t> ints;
  bool is_int = false;
};

class StateWriter {
 public:
  void Reals(StateTag tag, const Matrix& m) {
    Header(tag, ElementType::kF64, m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) body_.F64(m(i, j));
    }
  }
  void Column(StateTag tag, const Vector& v) {
    Header(tag, ElementType::kF64, v.size(), 1);
    for (Eigen::Index i = 0; i < v.size(); ++i) body_.F64(v(i));
  }
  void Scalar(StateTag tag, double v) {
    Header(tag, ElementType::kF64, 1, 1);
    body_.F64(v);
  }
  void Ints(StateTag tag, const std::vector<int32_t>& v) {
    Header(tag, ElementType::kI32, static_cast<Eigen::Index>(v.size()), 1);
    for (int32_t x : v) body_.I32(x);
  }
  void Head(const ModelHead& head) {
    Reals(StateTag::kHeadWeight, head.weight());
    Column(StateTag::kHeadBias, head.bias());
  }

  std::vector<std::byte> Finish(DetectorKind kind) {
    ByteWriter out;
    out.Raw(kStateMagic, 8);
    out.U32(static_cast<std::uint32_t>(kind));
    out.U32(count_);
    auto body = body_.Take();
    out.Raw(body.data(), body.size());
    return out.Take();
  }

 private:
  void Header(StateTag tag, ElementType type, Eigen::Index rows,
              Eigen::Index cols) {
    body_.U32(static_cast<std::uint32_t>(tag));
    body_.U8(static_cast<std::uint8_t>(type));
    body_.U8(0);
    body_.U8(0);
    body_.U8(0);
    body_.U32(static_cast<std::uint32_t>(rows));
    body_.U32(static_cast<std::uint32_t>(cols));
    ++count_;
  }

  ByteWriter body_;
  std::uint32_t count_ = 0;
};

class EntryMap {
 public:
  explicit EntryMap(std::map<std::uint32_t, Entry> entries)
      : entries_(std::move(entries)) {}

  const Entry& Take(StateTag tag, bool want_int) {
    auto it = entries_.find(static_cast<std::uint32_t>(tag));
    if (it == entries_.end()) {
      throw Error(ErrorCode::kMalformed,
                  "state is missing entry " +
                      std::to_string(static_cast<std::uint32_t>(tag)));
    }
    if (it->second.is_int != want_int) {
      throw Error(ErrorCode::kMalformed, "state entry has the wrong type");
    }
    used_.push_back(it->first);
    return it->second;
  }

  const Matrix& Reals(StateTag tag) { return Take(tag, false).reals; }

  Vector Column(StateTag tag) {
    const Entry& e = Take(tag, false);
    if (e.cols != 1) {
      throw Error(ErrorCode::kMalformed, "state entry must be a column");
    }
    return e.reals.col(0);
  }

  double Scalar(StateTag tag) {
    const Entry& e = Take(tag, false);
    if (e.rows != 1 || e.cols != 1) {
      throw Error(ErrorCode::kMalformed, "state entry must be a scalar");
    }
    return e.reals(0, 0);
  }

  const std::vector<int32_t>& Ints(StateTag tag) {
    const Entry& e = Take(tag, true);
    if (e.cols != 1) {
      throw Error(ErrorCode::kMalformed, "integer entry must be a column");
    }
    return e.ints;
  }

  ModelHead Head() {
    return ModelHead(Reals(StateTag::kHeadWeight),
                     Column(StateTag::kHeadBias));
  }

  // Every stored entry must have been consumed by the kind's decoder.
  void CheckAllUsed() const {
    if (used_.size() != entries_.size()) {
      throw Error(ErrorCode::kMalformed,
                  "state carries entries its detector does not use");
    }
  }

 private:
  std::map<std::uint32_t, Entry> entries_;
  std::vector<std::uint32_t> used_;
};

Entry ReadEntry(ByteReader& r, std::uint32_t* tag) {
  *tag = r.U32("entry header");
  const auto type = static_cast<ElementType>(r.U8("entry header"));
  auto reserved = r.Raw(3, "entry header");
  if (std::any_of(reserved.begin(), reserved.end(),
                  [](std::byte b) { return b != std::byte{0}; })) {
    throw Error(ErrorCode::kMalformed, "reserved entry bytes are not zero");
  }
  const std::uint32_t rows = r.U32("entry header");
  const std::uint32_t cols = r.U32("entry header");
  std::size_t width = 0;
  switch (type) {
    case ElementType::kF32:
    case ElementType::kI32:
      width = 4;
      break;
    case ElementType::kF64:
      width = 8;
      break;
    default:
      throw Error(ErrorCode::kMalformed, "unknown element type");
  }
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::kMalformed, "empty state entry");
  }
  const internal::Uint128 bytes =
      static_cast<internal::Uint128>(rows) * cols * width;
  if (bytes > r.remaining()) {
    throw Error(ErrorCode::kTruncated, "state entry payload is cut short");
  }
  Entry e;
  e.rows = rows;
  e.cols = cols;
  if (type == ElementType::kI32) {
    e.is_int = true;
    e.ints.resize(static_cast<std::size_t>(rows) * cols);
    for (auto& v : e.ints) v = r.I32("entry payload");
    return e;
  }
  e.reals.resize(rows, cols);
  for (Eigen::Index i = 0; i < e.reals.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.reals.cols(); ++j) {
      const double v = type == ElementType::kF64
                           ? r.F64("entry payload")
                           : static_cast<double>(r.F32("entry payload"));
      e.reals(i, j) = internal::CheckedFinite(v, "state entry");
    }
  }
  return e;
}

DetectorPayload DecodePayload(DetectorKind kind, EntryMap& entries) {
  switch (kind) {
    case DetectorKind::kMsp:
    case DetectorKind::kMls:
    case DetectorKind::kGradNorm:
      return std::monostate{};
    case DetectorKind::kGen:
      return GenState{entries.Scalar(StateTag::kGamma)};
    case DetectorKind::kMaha:
      return MahaState{entries.Ints(StateTag::kClasses),
                       entries.Reals(StateTag::kCentroids),
                       entries.Reals(StateTag::kCholesky)};
    case DetectorKind::kReactEnergy: {
      const double clamp = entries.Scalar(StateTag::kClamp);
      return ReactState{clamp, entries.Head()};
    }
    case DetectorKind::kKlm:
      return KlmState{entries.Reals(StateTag::kTemplates)};
    case DetectorKind::kKnn: {
      const auto& k = entries.Ints(StateTag::kNeighbourRank);
      if (k.size() != 1) {
        throw Error(ErrorCode::kMalformed, "knn rank must be a scalar");
      }
      return KnnState{entries.Reals(StateTag::kBank), k[0]};
    }
    case DetectorKind::kVim: {
      Vector offset = entries.Column(StateTag::kOffset);
      Matrix basis = entries.Reals(StateTag::kResidualBasis);
      const double alpha = entries.Scalar(StateTag::kAlpha);
      return VimState{std::move(offset), std::move(basis), alpha,
                      entries.Head()};
    }
  }
  throw Error(ErrorCode::kMalformed, "unknown detector kind");
}

}  // namespace

std::vector<std::byte> EncodeState(const DetectorState& state) {
  StateWriter w;
  std::visit(
      [&w](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GenState>) {
          w.Scalar(StateTag::kGamma, s.gamma);
        } else if constexpr (std::is_same_v<T, MahaState>) {
          w.Ints(StateTag::kClasses, s.classes);
          w.Reals(StateTag::kCentroids, s.centroids);
          w.Reals(StateTag::kCholesky, s.cholesky);
        } else if constexpr (std::is_same_v<T, ReactState>) {
          w.Scalar(StateTag::kClamp, s.clamp);
          w.Head(s.head);
        } else if constexpr (std::is_same_v<T, KlmState>) {
          w.Reals(StateTag::kTemplates, s.templates);
        } else if constexpr (std::is_same_v<T, KnnState>) {
          w.Reals(StateTag::kBank, s.bank);
          w.Ints(StateTag::kNeighbourRank, {s.k});
        } else if constexpr (std::is_same_v<T, VimState>) {
          w.Column(StateTag::kOffset, s.offset);
          w.Reals(StateTag::kResidualBasis, s.residual_basis);
          w.Scalar(StateTag::kAlpha, s.alpha);
          w.Head(s.head);
        }
      },
      state.payload());
  return w.Finish(state.kind());
}

std::size_t WriteState(const DetectorState& state, std::ostream& sink) {
  const auto bytes = EncodeState(state);
  sink.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw Error(ErrorCode::kIo, "write to sink failed");
  return bytes.size();
}

DetectorState DecodeState(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  auto magic = r.Raw(8, "magic");
  if (std::memcmp(magic.data(), kStateMagic, 8) != 0) {
    throw Error(ErrorCode::kBadMagic, "expected \"OODSTA01\"");
  }
  const std::uint32_t kind_raw = r.U32("header");
  if (kind_raw > kMaxKind) {
    throw Error(ErrorCode::kMalformed, "unknown detector kind tag");
  }
  const auto kind = static_cast<DetectorKind>(kind_raw);
  const std::uint32_t count = r.U32("header");
  // Each entry needs at least a 16-byte header.
  if (static_cast<std::uint64_t>(count) * 16 > r.remaining()) {
    throw Error(ErrorCode::kTruncated, "entry count exceeds stream");
  }
  std::map<std::uint32_t, Entry> entries;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t tag = 0;
    Entry e = ReadEntry(r, &tag);
    if (!entries.emplace(tag, std::move(e)).second) {
      throw Error(ErrorCode::kMalformed, "duplicate state entry");
    }
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kSizeMismatch, "trailing bytes after state");
  }
  EntryMap map(std::move(entries));
  DetectorPayload payload = DecodePayload(kind, map);
  map.CheckAllUsed();
  return DetectorState(kind, std::move(payload));
}

DetectorState ReadState(std::istream& source) {
  return DecodeState(ReadAllBytes(source));
}

void WriteStateFile(const DetectorState& state,
                    const std::filesystem::path& path) {
  WriteFileBytes(EncodeState(state), path);
}

DetectorState ReadStateFile(const std::filesystem::path& path) {
  try {
    return DecodeState(ReadFileBytes(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

}  // namespace oodkit
