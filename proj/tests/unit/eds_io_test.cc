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

#include <cstring>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "oodkit/error.h"
#include "test_util.h"

namespace oodkit {
namespace {

using testing::RandomSet;

ErrorCode DecodeError(const std::vector<std::byte>& bytes) {
  try {
    DecodeEds(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode succeeded";
  return ErrorCode::kInvalidArgument;
}

TEST(EdsIoTest, EncodedSizeOfSingleLabelledRow) {
  EXPECT_EQ(EdsEncodedSize(1, 2, 2, true, false), 44u);
  EmbeddingSet set(Matrix::Ones(1, 2), Matrix::Zero(1, 2),
                   std::vector<int32_t>{1});
  EXPECT_EQ(EncodeEds(set).size(), 44u);
}

TEST(EdsIoTest, EncodedSizeSaturatesInsteadOfWrapping) {
  const auto huge = std::numeric_limits<std::uint32_t>::max();
  EXPECT_EQ(EdsEncodedSize(huge, huge, huge, true, true),
            std::numeric_limits<std::uint64_t>::max());
}

TEST(EdsIoTest, RejectsEmptySet) {
  EmbeddingSet empty(Matrix(0, 3), Matrix(0, 2));
  try {
    EncodeEds(empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(EdsIoTest, RandomRoundTripIsBitExact) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const bool labels = seed % 2 == 0;
    const bool groups = seed % 3 == 0;
    const EmbeddingSet set =
        RandomSet(1 + seed % 17, 1 + seed % 9, 2 + seed % 5, labels, groups, seed);
    std::stringstream stream;
    WriteEds(set, stream);
    const EmbeddingSet back = ReadEds(stream);
    EXPECT_TRUE(back == set) << "seed " << seed;
    EXPECT_EQ(std::memcmp(back.features().data(), set.features().data(),
                          sizeof(double) * set.features().size()),
              0);
  }
}

TEST(EdsIoTest, BadMagic) {
  auto bytes = EncodeEds(RandomSet(3, 2, 2, true, false, 1));
  bytes[0] = std::byte{'X'};
  EXPECT_EQ(DecodeError(bytes), ErrorCode::kBadMagic);
}

TEST(EdsIoTest, TruncatedByOneByte) {
  auto bytes = EncodeEds(RandomSet(3, 2, 2, true, true, 2));
  bytes.pop_back();
  EXPECT_EQ(DecodeError(bytes), ErrorCode::kTruncated);
}

TEST(EdsIoTest, TrailingBytes) {
  auto bytes = EncodeEds(RandomSet(3, 2, 2, false, false, 3));
  bytes.push_back(std::byte{0});
  EXPECT_EQ(DecodeError(bytes), ErrorCode::kSizeMismatch);
}

TEST(EdsIoTest, UnknownFlagsAndReservedBytes) {
  auto bytes = EncodeEds(RandomSet(3, 2, 2, false, false, 4));
  auto flagged = bytes;
  flagged[20] = std::byte{0x4};
  EXPECT_EQ(DecodeError(flagged), ErrorCode::kMalformed);
  auto reserved = bytes;
  reserved[22] = std::byte{1};
  EXPECT_EQ(DecodeError(reserved), ErrorCode::kMalformed);
}

TEST(EdsIoTest, NonFiniteValueRejected) {
  auto bytes = EncodeEds(RandomSet(2, 2, 2, false, false, 5));
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bytes.data() + kEdsHeaderSize + 4, &nan, 4);
  EXPECT_EQ(DecodeError(bytes), ErrorCode::kNonFinite);
}

TEST(EdsIoTest, ValueOutsideBinary32RangeRejectedOnWrite) {
  Matrix f = Matrix::Zero(1, 2);
  f(0, 1) = 1e300;
  EmbeddingSet set(f, Matrix::Zero(1, 2));
  try {
    EncodeEds(set);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
  }
}

TEST(EdsIoTest, AllMinusOneLabelsDecodeAsAbsent) {
  auto bytes = EncodeEds(RandomSet(3, 2, 2, true, false, 6));
  const int32_t minus_one = -1;
  const std::size_t labels_at = bytes.size() - 3 * 4;
  for (int i = 0; i < 3; ++i) {
    std::memcpy(bytes.data() + labels_at + 4 * i, &minus_one, 4);
  }
  EXPECT_FALSE(DecodeEds(bytes).has_labels());
  const int32_t minus_two = -2;
  std::memcpy(bytes.data() + labels_at, &minus_two, 4);
  EXPECT_EQ(DecodeError(bytes), ErrorCode::kMalformed);
}

TEST(EdsIoTest, HeaderCountsMustBeValid) {
  auto bytes = EncodeEds(RandomSet(1, 2, 2, false, false, 7));
  auto zero_n = bytes;
  std::memset(zero_n.data() + 8, 0, 4);
  EXPECT_NE(DecodeError(zero_n), ErrorCode::kBadMagic);
  auto one_class = bytes;
  const std::uint32_t one = 1;
  std::memcpy(one_class.data() + 16, &one, 4);
  EXPECT_NE(DecodeError(one_class), ErrorCode::kBadMagic);
}

TEST(HeadIoTest, EncodedSize) {
  ModelHead head(Matrix::Ones(2, 3), Vector::Zero(2));
  EXPECT_EQ(EncodeHead(head).size(), 48u);
}

TEST(HeadIoTest, RoundTrip) {
  Matrix w(2, 3);
  w << 1, 2, 3, -4, 0.5, 0.25;
  Vector b(2);
  b << -1, 2;
  ModelHead head(w, b);
  std::stringstream stream;
  WriteHead(head, stream);
  EXPECT_TRUE(ReadHead(stream) == head);
}

TEST(HeadIoTest, NaNWeightRejected) {
  Matrix w = Matrix::Ones(2, 3);
  w(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(ModelHead(w, Vector::Zero(2)), Error);

  auto bytes = EncodeHead(ModelHead(Matrix::Ones(2, 3), Vector::Zero(2)));
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bytes.data() + kHeadHeaderSize, &nan, 4);
  try {
    DecodeHead(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
  }
}

TEST(HeadIoTest, TruncatedAndBadMagic) {
  auto bytes = EncodeHead(ModelHead(Matrix::Ones(2, 3), Vector::Zero(2)));
  auto shorter = bytes;
  shorter.pop_back();
  EXPECT_THROW(DecodeHead(shorter), Error);
  bytes[3] = std::byte{0};
  try {
    DecodeHead(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadMagic);
  }
}

TEST(EdsFileTest, FileRoundTripAndMissingFile) {
  const auto dir = testing::ScratchDir("eds_file");
  const EmbeddingSet set = RandomSet(5, 4, 3, true, true, 9);
  WriteEdsFile(set, dir / "a.eds");
  EXPECT_TRUE(ReadEdsFile(dir / "a.eds") == set);
  try {
    ReadEdsFile(dir / "missing.eds");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace oodkit
