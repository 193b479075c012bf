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

#include <cstring>
#include <sstream>

#include <gtest/gtest.h>

#include "oodkit/error.h"
#include "oodkit/synthetic.h"
#include "test_util.h"

namespace oodkit {
namespace {

SyntheticData Data() {
  SyntheticSpec spec;
  spec.num_classes = 3;
  spec.feature_dim = 6;
  spec.per_class = 30;
  spec.noise_scale = 3.0;
  spec.centroid_scale = 5.0;
  return GenerateSynthetic(spec);
}

TEST(DetectorStateIoTest, EveryDetectorRoundTripsAndScoresIdentically) {
  const SyntheticData data = Data();
  const EmbeddingSet probe = testing::RandomSet(20, 6, 3, false, false, 4);
  for (DetectorKind kind : kAllDetectors) {
    const DetectorState state = Fit(kind, {}, data.set, &data.head);
    std::stringstream stream;
    WriteState(state, stream);
    const DetectorState back = ReadState(stream);
    EXPECT_EQ(back.kind(), kind);
    EXPECT_EQ(Score(back, probe), Score(state, probe)) << DetectorName(kind);
    EXPECT_EQ(EncodeState(back), EncodeState(state));
  }
}

TEST(DetectorStateIoTest, RejectsCorruptContainers) {
  const SyntheticData data = Data();
  const auto bytes =
      EncodeState(Fit(DetectorKind::kMaha, {}, data.set, &data.head));
  const auto code_of = [](const std::vector<std::byte>& b) {
    try {
      DecodeState(b);
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "decode succeeded";
    return ErrorCode::kIo;
  };
  auto magic = bytes;
  magic[0] = std::byte{'x'};
  EXPECT_EQ(code_of(magic), ErrorCode::kBadMagic);
  auto shorter = bytes;
  shorter.pop_back();
  EXPECT_EQ(code_of(shorter), ErrorCode::kTruncated);
  auto longer = bytes;
  longer.push_back(std::byte{0});
  EXPECT_EQ(code_of(longer), ErrorCode::kSizeMismatch);
  auto kind = bytes;
  const std::uint32_t bogus = 99;
  std::memcpy(kind.data() + 8, &bogus, 4);
  EXPECT_EQ(code_of(kind), ErrorCode::kMalformed);
  // Swapping the kind to KNN leaves the MAHA entries unused.
  auto other = bytes;
  const auto knn = static_cast<std::uint32_t>(DetectorKind::kKnn);
  std::memcpy(other.data() + 8, &knn, 4);
  EXPECT_EQ(code_of(other), ErrorCode::kMalformed);
}

TEST(DetectorStateIoTest, FileRoundTrip) {
  const auto dir = testing::ScratchDir("state_io");
  const DetectorState gen(DetectorKind::kGen, GenState{0.3});
  WriteStateFile(gen, dir / "gen.sta");
  EXPECT_EQ(ReadStateFile(dir / "gen.sta").get<GenState>().gamma, 0.3);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace oodkit
