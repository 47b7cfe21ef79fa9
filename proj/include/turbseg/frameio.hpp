// Copyright 2026 The turbseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "turbseg/image.hpp"

namespace turbseg {

/// Raised for malformed or unreadable files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace fs = std::filesystem;

/// BT.601 luma, round(0.299r + 0.587g + 0.114b), computed in integers.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Index taken from the last run of digits in a file name, e.g.
/// "frame_000012.png" -> 12. Empty when the name has no digits.
std::optional<long long> frame_index_from_name(std::string_view filename);

/// Glob match supporting '*' and '?'.
bool match_pattern(std::string_view pattern, std::string_view name);

/// Files in `directory` whose names match `pattern`, sorted by frame index
/// (then by name when indices tie or are absent).
std::vector<fs::path> list_frame_files(const fs::path& directory,
                                       std::string_view pattern);

// PNG. Readers accept 8-bit gray and 8-bit RGB (alpha and 16-bit depth are
// stripped); color is reduced with luma().
Frame read_frame(const fs::path& path);
void write_frame(const Frame& frame, const fs::path& path);
std::vector<Frame> load_frame_sequence(const fs::path& directory,
                                       std::string_view pattern = "*.png");

/// Mask pixels > 127 read as 1. If `expected` is given, its dimensions are
/// enforced.
BinaryMask read_mask(const fs::path& path,
                     std::optional<Dims> expected = std::nullopt);
void write_mask(const BinaryMask& mask, const fs::path& path);

/// 8-bit RGB, interleaved, used for overlays.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
};

std::vector<std::uint8_t> encode_png_gray(const Grid<std::uint8_t>& img);
std::vector<std::uint8_t> encode_png_rgb(const RgbImage& img);
void write_bytes(const std::vector<std::uint8_t>& bytes, const fs::path& path);
std::vector<std::uint8_t> read_bytes(const fs::path& path);

// Middlebury .flo: float magic 202021.25, int32 width, int32 height, then
// interleaved (u,v) float32 rows, all little-endian.
inline constexpr float kFloMagic = 202021.25f;
FlowField read_flow(const fs::path& path);
void write_flow(const FlowField& field, const fs::path& path);
FlowField decode_flow(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_flow(const FlowField& field);

// Grayscale PFM ("Pf"). Rows are stored bottom-up in the file and top-down in
// memory. Writing always emits little-endian (scale -1).
ScoreMap read_score_map(const fs::path& path);
void write_score_map(const ScoreMap& map, const fs::path& path);
ScoreMap decode_pfm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_pfm(const ScoreMap& map);

}  // namespace turbseg
