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
#ifndef OODKIT_EDS_IO_H_
#define OODKIT_EDS_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "oodkit/embedding_set.h"

namespace oodkit {

// Embedding dump (EDS), little-endian, no padding:
//   [0, 8)   "OODEDS01"
//   [8, 20)  u32 n, u32 d, u32 c
//   [20]     flags: bit0 labels present, bit1 groups present
//   [21, 24) zero
//   n*d binary32 features, n*c binary32 logits (row-major),
//   then n i32 labels if bit0, n i32 groups if bit1.
inline constexpr char kEdsMagic[8] = {'O', 'O', 'D', 'E', 'D', 'S', '0', '1'};
inline constexpr std::size_t kEdsHeaderSize = 24;
inline constexpr std::uint8_t kEdsFlagLabels = 1u << 0;
inline constexpr std::uint8_t kEdsFlagGroups = 1u << 1;

// Head file: "OODHEAD1", u32 c, u32 d, c*d binary32 weight, c binary32 bias.
inline constexpr char kHeadMagic[8] = {'O', 'O', 'D', 'H', 'E', 'A', 'D', '1'};
inline constexpr std::size_t kHeadHeaderSize = 16;

std::uint64_t EdsEncodedSize(std::uint64_t n, std::uint64_t d, std::uint64_t c,
                             bool labels, bool groups);

// Serialises the set. Rejects n == 0 and values outside binary32 range before
// anything is emitted. Values are rounded to binary32.
std::vector<std::byte> EncodeEds(const EmbeddingSet& set);
std::size_t WriteEds(const EmbeddingSet& set, std::ostream& sink);

// A labels block whose entries are all -1 decodes as "no labels"; any other
// negative label is malformed.
EmbeddingSet DecodeEds(std::span<const std::byte> bytes);
EmbeddingSet ReadEds(std::istream& source);

std::vector<std::byte> EncodeHead(const ModelHead& head);
std::size_t WriteHead(const ModelHead& head, std::ostream& sink);
ModelHead DecodeHead(std::span<const std::byte> bytes);
ModelHead ReadHead(std::istream& source);

EmbeddingSet ReadEdsFile(const std::filesystem::path& path);
void WriteEdsFile(const EmbeddingSet& set, const std::filesystem::path& path);
ModelHead ReadHeadFile(const std::filesystem::path& path);
void WriteHeadFile(const ModelHead& head, const std::filesystem::path& path);

// Whole-stream helpers shared by the binary readers.
std::vector<std::byte> ReadAllBytes(std::istream& source);
std::vector<std::byte> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(std::span<const std::byte> bytes,
                    const std::filesystem::path& path);

}  // namespace oodkit

#endif  // OODKIT_EDS_IO_H_
