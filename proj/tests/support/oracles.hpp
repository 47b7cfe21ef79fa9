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

// Brute-force reference implementations used only by tests. None of these
// call into the library code paths they are compared against.

#include <cstdint>
#include <set>
#include <vector>

#include "turbseg/image.hpp"

namespace turbseg::oracle {

/// Components by BFS flood fill, each a sorted list of row-major pixel
/// indices, ordered by first pixel.
std::vector<std::vector<std::uint32_t>> flood_fill_components(const BinaryMask& mask,
                                                              int connectivity);

/// Sort-based percentile at rank floor(p/100 * N) capped at N-1.
float sorted_percentile(const ScoreMap& map, double percentile);

/// IoU and Dice from explicit pixel sets.
double set_iou(const BinaryMask& a, const BinaryMask& b);
double set_dice(const BinaryMask& a, const BinaryMask& b);

}  // namespace turbseg::oracle
