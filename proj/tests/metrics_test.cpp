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

#include "turbseg/metrics.hpp"

#include <cmath>

#include <gtest/gtest.h>
#include <json.hpp>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace turbseg {
namespace {

BinaryMask pixels(int w, int h, std::initializer_list<std::pair<int, int>> on) {
  BinaryMask m(w, h);
  for (auto [x, y] : on) m.at(x, y) = 1;
  return m;
}

TEST(FrameMetricsTest, Examples) {
  const auto a = pixels(4, 4, {{0, 0}, {1, 0}});
  const auto b = pixels(4, 4, {{1, 0}, {2, 0}});
  EXPECT_EQ(frame_iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(frame_iou(a, b), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(frame_dice(a, b), 0.5);
  EXPECT_EQ(frame_iou(BinaryMask(4, 4), BinaryMask(4, 4)), 1.0);
  EXPECT_EQ(frame_dice(BinaryMask(4, 4), BinaryMask(4, 4)), 1.0);
  const auto c = pixels(4, 4, {{3, 3}});
  EXPECT_EQ(frame_dice(a, c), 0.0);
  EXPECT_EQ(frame_iou(a, BinaryMask(4, 4)), 0.0);
  EXPECT_THROW(frame_iou(a, BinaryMask(4, 5)), std::invalid_argument);
}

TEST(FrameMetricsTest, IdentitiesOnRandomPairs) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const int w = 1 + int(rng() % 64), h = 1 + int(rng() % 64);
    const auto a = testing::random_mask(rng, w, h, double(rng() % 100) / 100);
    const auto b = testing::random_mask(rng, w, h, double(rng() % 100) / 100);
    const double iou = frame_iou(a, b), dice = frame_dice(a, b);
    ASSERT_NEAR(iou, oracle::set_iou(a, b), 1e-12);
    ASSERT_NEAR(dice, oracle::set_dice(a, b), 1e-12);
    ASSERT_NEAR(dice, 2 * iou / (1 + iou), 1e-12);
    ASSERT_EQ(iou, frame_iou(b, a));
    ASSERT_EQ(dice, frame_dice(b, a));
    ASSERT_GE(iou, 0.0);
    ASSERT_LE(dice, 1.0);
    ASSERT_LE(iou, dice);
    if (iou > 0.0 && iou < 1.0) ASSERT_LT(iou, dice);
  }
}

TEST(ScoreFrameTest, EmptyPolicies) {
  const BinaryMask e(3, 3);
  EXPECT_EQ(score_frame(e, e, EmptyPolicy::one)->iou, 1.0);
  EXPECT_EQ(score_frame(e, e, EmptyPolicy::zero)->dice, 0.0);
  EXPECT_FALSE(score_frame(e, e, EmptyPolicy::skip).has_value());
  const auto a = pixels(3, 3, {{1, 1}});
  EXPECT_EQ(score_frame(a, a, EmptyPolicy::skip)->iou, 1.0);
  for (auto p : {EmptyPolicy::one, EmptyPolicy::zero, EmptyPolicy::skip}) {
    EXPECT_EQ(parse_empty_policy(to_string(p)), p);
  }
}

TEST(AggregateTest, ReferenceBenchmarkFinals) {
  const double miou[] = {0.3327, 0.4807, 0.4456, 0.4590, 0.4766, 0.3557};
  const double mdice[] = {0.3995, 0.4902, 0.4712, 0.4786, 0.4880, 0.4157};
  std::vector<VideoFrames> videos;
  for (int i = 0; i < 6; ++i) {
    videos.push_back({"v" + std::to_string(i), {{miou[i], mdice[i]}}});
  }
  const auto r = aggregate(videos);
  EXPECT_NEAR(r.final_miou, 0.425041, 5e-4);
  EXPECT_NEAR(r.final_mdice, 0.457206, 5e-4);
  EXPECT_NEAR(r.final_miou, 2.5503 / 6, 1e-12);
  EXPECT_NEAR(r.final_mdice, 2.7432 / 6, 1e-12);
}

TEST(AggregateTest, FramesThenVideosUnweighted) {
  // Video a: frames 1.0, 0.0 -> 0.5. Video b: one frame 1.0 -> 1.0.
  // Final 0.75, not the pooled 2/3.
  const auto r = aggregate({{"a", {{1.0, 1.0}, {0.0, 0.0}}}, {"b", {{1.0, 1.0}}}});
  EXPECT_DOUBLE_EQ(r.videos[0].miou, 0.5);
  EXPECT_EQ(r.videos[0].frames, 2u);
  EXPECT_DOUBLE_EQ(r.final_miou, 0.75);
}

TEST(AggregateTest, SingleIdenticalFrame) {
  const auto m = pixels(5, 5, {{2, 2}, {2, 3}});
  const auto r = aggregate({score_video("only", {m}, {m}, EmptyPolicy::one)});
  EXPECT_EQ(r.final_miou, 1.0);
  EXPECT_EQ(r.final_mdice, 1.0);
}

TEST(AggregateTest, Errors) {
  EXPECT_THROW(aggregate({}), std::invalid_argument);
  EXPECT_THROW(aggregate({{"empty", {}}}), std::invalid_argument);
  EXPECT_THROW(score_video("x", {BinaryMask(2, 2)}, {}, EmptyPolicy::one), std::invalid_argument);
}

TEST(EvalReportTest, JsonAndTable) {
  const auto r = aggregate({{"clip", {{0.5, 2.0 / 3.0}}}}, EmptyPolicy::skip);
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(j["empty_policy"], "skip");
  EXPECT_EQ(j["videos"][0]["name"], "clip");
  EXPECT_DOUBLE_EQ(j["final"]["miou"].get<double>(), 0.5);
  const auto table = r.to_table();
  EXPECT_NE(table.find("Final evaluation"), std::string::npos);
  EXPECT_NE(table.find("0.500000"), std::string::npos);
  EXPECT_NE(table.find("0.666667"), std::string::npos);
}

}  // namespace
}  // namespace turbseg
