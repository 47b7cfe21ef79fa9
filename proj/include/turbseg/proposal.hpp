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
#include <vector>

#include "turbseg/image.hpp"

namespace turbseg {

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  long long area() const {
    return x1 > x0 && y1 > y0 ? static_cast<long long>(x1 - x0) * (y1 - y0) : 0;
  }
  bool contains(int x, int y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
  bool valid_in(Dims d) const {
    return 0 <= x0 && x0 < x1 && x1 <= d.width && 0 <= y0 && y0 < y1 &&
           y1 <= d.height;
  }
  friend bool operator==(const Box&, const Box&) = default;
};

struct Component {
  int label = 0;
  std::vector<std::uint32_t> pixels;  // row-major indices, ascending
  Box extent;                         // tight

  std::size_t area() const { return pixels.size(); }
};

struct BoxProposal {
  int frame = 0;
  Box box;
  double score = 0.0;
  int id = 0;

  friend bool operator==(const BoxProposal&, const BoxProposal&) = default;
};

struct ProposalParams {
  int min_area = 9;
  int margin = 4;
  int connectivity = 8;

  void validate() const;
  friend bool operator==(const ProposalParams&, const ProposalParams&) = default;
};

/// Two-pass union-find labeling. Components are ordered (and labelled
/// 0, 1, ...) by their first pixel in row-major order.
std::vector<Component> connected_components(const BinaryMask& mask,
                                            int connectivity = 8);

/// Drops components smaller than `min_area`, grows each tight extent by
/// `margin` (clipped to `bounds`), and scores it by the mean of `s` over the
/// component's pixels. Ids follow component order.
std::vector<BoxProposal> components_to_boxes(const std::vector<Component>& comps,
                                             const ScoreMap& s, int min_area,
                                             int margin, Dims bounds,
                                             int frame = 0);

/// binarize -> components -> boxes for one frame.
std::vector<BoxProposal> propose_boxes(const BinaryMask& mask, const ScoreMap& s,
                                       const ProposalParams& params, int frame);

}  // namespace turbseg
