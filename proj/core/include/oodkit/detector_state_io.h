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
#ifndef OODKIT_DETECTOR_STATE_IO_H_
#define OODKIT_DETECTOR_STATE_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "oodkit/detectors.h"

namespace oodkit {

// Fitted-state container, little-endian:
//   "OODSTA01", u32 kind, u32 entry count, then per entry
//   u32 tag, u8 element type (1 binary32, 2 binary64, 3 i32), 3 zero bytes,
//   u32 rows, u32 cols, rows*cols elements row-major.
// The writer emits binary64 for real matrices so a reloaded state scores
// bit-identically to the in-memory one; the reader also accepts binary32.
inline constexpr char kStateMagic[8] = {'O', 'O', 'D', 'S', 'T', 'A', '0', '1'};

enum class StateTag : std::uint32_t {
  kClasses = 1,
  kCentroids = 2,
  kCholesky = 3,
  kClamp = 4,
  kHeadWeight = 5,
  kHeadBias = 6,
  kTemplates = 7,
  kBank = 8,
  kNeighbourRank = 9,
  kOffset = 10,
  kResidualBasis = 11,
  kAlpha = 12,
  kGamma = 13,
};

std::vector<std::byte> EncodeState(const DetectorState& state);
std::size_t WriteState(const DetectorState& state, std::ostream& sink);
DetectorState DecodeState(std::span<const std::byte> bytes);
DetectorState ReadState(std::istream& source);

void WriteStateFile(const DetectorState& state,
                    const std::filesystem::path& path);
DetectorState ReadStateFile(const std::filesystem::path& path);

}  // namespace oodkit

#endif  // OODKIT_DETECTOR_STATE_IO_H_
