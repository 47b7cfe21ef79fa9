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

#include "turbseg/proposal.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace turbseg {

void ProposalParams::validate() const {
  if (min_area < 1) throw std::invalid_argument("proposal: min_area must be >= 1");
  if (margin < 0) throw std::invalid_argument("proposal: margin must be >= 0");
  if (connectivity != 4 && connectivity != 8) {
    throw std::invalid_argument("proposal: connectivity must be 4 or 8");
  }
}

namespace {

class DisjointSet {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // Smaller root wins, so a set's root is its earliest provisional label.
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a < b) parent_[b] = a;
    else if (b < a) parent_[a] = b;
  }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

std::vector<Component> connected_components(const BinaryMask& mask,
                                            int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw std::invalid_argument("connected_components: connectivity must be 4 or 8");
  }
  const int w = mask.width(), h = mask.height();
  constexpr std::uint32_t kNone = UINT32_MAX;
  std::vector<std::uint32_t> prov(mask.size(), kNone);
  DisjointSet sets;

  // First pass: provisional labels from the already-visited neighbours
  // (W, NW, N, NE under 8-connectivity; W, N under 4).
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = std::size_t(y) * w + x;
      if (!mask[i]) continue;
      std::uint32_t label = kNone;
      auto visit = [&](int nx, int ny) {
        if (nx < 0 || nx >= w || ny < 0) return;
        const auto l = prov[std::size_t(ny) * w + nx];
        if (l == kNone) return;
        if (label == kNone) label = l;
        else sets.unite(label, l);
      };
      visit(x - 1, y);
      visit(x, y - 1);
      if (connectivity == 8) {
        visit(x - 1, y - 1);
        visit(x + 1, y - 1);
      }
      prov[i] = label == kNone ? sets.make() : label;
    }
  }

  // Second pass: roots become components in order of first appearance, which
  // is row-major order of each component's first pixel.
  std::vector<Component> comps;
  std::vector<std::uint32_t> root_to_comp;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = std::size_t(y) * w + x;
      if (prov[i] == kNone) continue;
      const auto root = sets.find(prov[i]);
      if (root >= root_to_comp.size()) root_to_comp.resize(root + 1, kNone);
      if (root_to_comp[root] == kNone) {
        root_to_comp[root] = static_cast<std::uint32_t>(comps.size());
        Component c;
        c.label = static_cast<int>(comps.size());
        c.extent = {x, y, x + 1, y + 1};
        comps.push_back(std::move(c));
      }
      auto& c = comps[root_to_comp[root]];
      c.pixels.push_back(static_cast<std::uint32_t>(i));
      c.extent.x0 = std::min(c.extent.x0, x);
      c.extent.x1 = std::max(c.extent.x1, x + 1);
      c.extent.y1 = std::max(c.extent.y1, y + 1);
    }
  }
  return comps;
}

std::vector<BoxProposal> components_to_boxes(const std::vector<Component>& comps,
                                             const ScoreMap& s, int min_area,
                                             int margin, Dims bounds,
                                             int frame) {
  std::vector<BoxProposal> out;
  for (const auto& c : comps) {
    if (c.area() < static_cast<std::size_t>(std::max(min_area, 0))) continue;
    double sum = 0.0;
    for (auto i : c.pixels) sum += s[i];
    BoxProposal p;
    p.frame = frame;
    p.box = {std::max(0, c.extent.x0 - margin), std::max(0, c.extent.y0 - margin),
             std::min(bounds.width, c.extent.x1 + margin),
             std::min(bounds.height, c.extent.y1 + margin)};
    p.score = std::clamp(sum / double(c.area()), 0.0, 1.0);
    p.id = static_cast<int>(out.size());
    out.push_back(p);
  }
  return out;
}

std::vector<BoxProposal> propose_boxes(const BinaryMask& mask, const ScoreMap& s,
                                       const ProposalParams& params, int frame) {
  params.validate();
  require_same_shape(mask, s, "propose_boxes");
  return components_to_boxes(connected_components(mask, params.connectivity), s,
                             params.min_area, params.margin, mask.dims(), frame);
}

}  // namespace turbseg
