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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "turbseg/image.hpp"
#include "turbseg/temporal.hpp"

namespace turbseg {

// Adapter contract. Prompts go out as JSON lines, one object per frame:
//   {"frame":t,"boxes":[{"id":i,"x0":..,"y0":..,"x1":..,"y1":..,"score":s}]}
// Refined masks come back as refined_{t:06}.png, one merged mask per frame.

std::string encode_prompts(const BoxTable& boxes, std::optional<Dims> bounds = {});
BoxTable decode_prompts(const std::string& text);

/// Validates every box (integer corners, x0 < x1, y0 < y1, inside `bounds`
/// when given, score in [0,1]) before anything is written.
void export_prompts(const BoxTable& boxes, const std::filesystem::path& path,
                    std::optional<Dims> bounds = {});
BoxTable import_prompts(const std::filesystem::path& path);

std::string refined_file_name(int t);

/// Refined masks for frames 0..len-1. Throws naming the first missing frame.
std::vector<BinaryMask> import_refined(const std::filesystem::path& dir,
                                       Dims expected, int len);

/// Like import_refined, but missing frames come back empty.
std::vector<std::optional<BinaryMask>> import_refined_partial(
    const std::filesystem::path& dir, Dims expected, int len);

/// Union over boxes of the in-box pixels with s >= tau_box. A box that
/// selects nothing is filled whole, since the prompt asserts an object.
BinaryMask fallback_refine(const ScoreMap& s, const std::vector<BoxProposal>& boxes,
                           double tau_box);

/// Fraction of set mask pixels lying inside at least one box (1.0 for an
/// empty mask).
double containment_fraction(const BinaryMask& mask,
                            const std::vector<BoxProposal>& boxes);

inline constexpr double kContainmentAuditMin = 0.95;

}  // namespace turbseg
