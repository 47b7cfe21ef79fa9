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

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace turbseg {
namespace {

std::vector<std::vector<std::uint32_t>> partition(const std::vector<Component>& comps) {
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& c : comps) out.push_back(c.pixels);
  return out;
}

void expect_tight(const Component& c, int width) {
  Box tight{1 << 30, 1 << 30, -1, -1};
  for (auto p : c.pixels) {
    const int x = int(p) % width, y = int(p) / width;
    tight = {std::min(tight.x0, x), std::min(tight.y0, y), std::max(tight.x1, x + 1),
             std::max(tight.y1, y + 1)};
  }
  EXPECT_EQ(c.extent, tight);
}

TEST(ComponentsTest, EmptyMask) {
  EXPECT_TRUE(connected_components(BinaryMask(5, 5)).empty());
}

TEST(ComponentsTest, DiagonalPixels) {
  BinaryMask m(3, 3);
  m.at(0, 0) = 1;
  m.at(1, 1) = 1;
  EXPECT_EQ(connected_components(m, 8).size(), 1u);
  EXPECT_EQ(connected_components(m, 4).size(), 2u);
}

TEST(ComponentsTest, LabelsOrderedByFirstPixel) {
  // A U shape whose right arm starts first would be labelled 1 by a naive
  // first-pass labeling.
  BinaryMask m(5, 4);
  for (int y = 0; y < 4; ++y) m.at(4, y) = 1;
  for (int x = 0; x < 5; ++x) m.at(x, 3) = 1;
  m.at(0, 1) = 1;
  m.at(0, 2) = 1;
  m.at(2, 0) = 1;
  const auto comps = connected_components(m, 4);
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0].pixels.front(), 2u);
  EXPECT_EQ(comps[0].area(), 1u);
  EXPECT_EQ(comps[1].label, 1);
  EXPECT_EQ(comps[1].pixels.front(), 4u);
  EXPECT_EQ(comps[1].extent, (Box{0, 0, 5, 4}));
}

TEST(ComponentsTest, MatchesFloodFillOnRandomMasks) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = 1 + int(rng() % 32), h = 1 + int(rng() % 32);
    const auto m = testing::random_mask(rng, w, h, double(rng() % 100) / 100);
    for (int conn : {4, 8}) {
      const auto comps = connected_components(m, conn);
      ASSERT_EQ(partition(comps), oracle::flood_fill_components(m, conn));
      for (std::size_t i = 0; i < comps.size(); ++i) {
        ASSERT_EQ(comps[i].label, int(i));
        expect_tight(comps[i], w);
      }
    }
  }
}

TEST(ComponentsTest, MatchesFloodFillExhaustively3x3And4x4Sample) {
  for (std::uint32_t bits = 0; bits < (1u << 9); ++bits) {
    BinaryMask m(3, 3);
    for (int i = 0; i < 9; ++i) m[std::size_t(i)] = (bits >> i) & 1;
    for (int conn : {4, 8}) {
      ASSERT_EQ(partition(connected_components(m, conn)), oracle::flood_fill_components(m, conn));
    }
  }
  for (std::uint32_t bits = 0; bits < (1u << 16); bits += 7) {
    BinaryMask m(4, 4);
    for (int i = 0; i < 16; ++i) m[std::size_t(i)] = (bits >> i) & 1;
    for (int conn : {4, 8}) {
      ASSERT_EQ(partition(connected_components(m, conn)), oracle::flood_fill_components(m, conn));
    }
  }
}

TEST(ComponentsTest, RejectsBadConnectivity) {
  EXPECT_THROW(connected_components(BinaryMask(2, 2), 6), std::invalid_argument);
}

TEST(BoxesTest, AreaFilter) {
  BinaryMask m(8, 8);
  m.at(1, 1) = m.at(2, 1) = 1;
  const ScoreMap s(8, 8, 1.f);
  EXPECT_TRUE(components_to_boxes(connected_components(m), s, 10, 2, m.dims()).empty());
  EXPECT_EQ(components_to_boxes(connected_components(m), s, 2, 0, m.dims()).size(), 1u);
}

TEST(BoxesTest, MarginExpansion) {
  BinaryMask m(64, 64);
  for (int y = 5; y < 15; ++y) {
    for (int x = 5; x < 15; ++x) m.at(x, y) = 1;
  }
  ScoreMap s(64, 64, 0.f);
  for (int y = 5; y < 15; ++y) {
    for (int x = 5; x < 10; ++x) s.at(x, y) = 1.f;
  }
  const auto comps = connected_components(m);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_EQ(comps[0].extent, (Box{5, 5, 15, 15}));
  const auto boxes = components_to_boxes(comps, s, 9, 2, m.dims(), 7);
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0].box, (Box{3, 3, 17, 17}));
  EXPECT_DOUBLE_EQ(boxes[0].score, 0.5);
  EXPECT_EQ(boxes[0].frame, 7);
  EXPECT_EQ(boxes[0].id, 0);
}

TEST(BoxesTest, ClippedAtCorner) {
  BinaryMask m(20, 20);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) m.at(x, y) = 1;
  }
  const auto boxes = components_to_boxes(connected_components(m), ScoreMap(20, 20, 1.f), 1, 3,
                                         m.dims());
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0].box, (Box{0, 0, 6, 6}));
  BinaryMask far(20, 20);
  far.at(19, 19) = 1;
  EXPECT_EQ(components_to_boxes(connected_components(far), ScoreMap(20, 20, 1.f), 1, 3,
                                far.dims())[0].box,
            (Box{16, 16, 20, 20}));
}

TEST(BoxesTest, Invariants) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 4 + int(rng() % 40), h = 4 + int(rng() % 40);
    const auto m = testing::random_mask(rng, w, h, 0.3);
    const auto s = testing::random_map(rng, w, h);
    const auto comps = connected_components(m);
    const int margin = int(rng() % 5);
    std::size_t prev = comps.size() + 1;
    for (int min_area = 1; min_area <= 12; ++min_area) {
      const auto boxes = components_to_boxes(comps, s, min_area, margin, m.dims());
      ASSERT_LE(boxes.size(), prev);
      prev = boxes.size();
      std::size_t k = 0;
      for (const auto& c : comps) {
        if (c.area() < std::size_t(min_area)) continue;
        const auto& b = boxes[k];
        ASSERT_EQ(b.id, int(k));
        ASSERT_TRUE(b.box.valid_in(m.dims()));
        ASSERT_GE(b.score, 0.0);
        ASSERT_LE(b.score, 1.0);
        for (auto p : c.pixels) ASSERT_TRUE(b.box.contains(int(p) % w, int(p) / w));
        ++k;
      }
      ASSERT_EQ(k, boxes.size());
    }
  }
}

TEST(BoxesTest, ProposeBoxesUsesParams) {
  BinaryMask m(10, 10);
  m.at(1, 1) = m.at(2, 2) = 1;  // diagonal pair
  const ScoreMap s(10, 10, 0.6f);
  EXPECT_EQ(propose_boxes(m, s, ProposalParams{2, 0, 8}, 3).size(), 1u);
  EXPECT_EQ(propose_boxes(m, s, ProposalParams{2, 0, 4}, 3).size(), 0u);
  EXPECT_THROW((ProposalParams{0, 0, 8}.validate()), std::invalid_argument);
  EXPECT_THROW((ProposalParams{1, -1, 8}.validate()), std::invalid_argument);
  EXPECT_THROW((ProposalParams{1, 0, 5}.validate()), std::invalid_argument);
}

}  // namespace
}  // namespace turbseg
