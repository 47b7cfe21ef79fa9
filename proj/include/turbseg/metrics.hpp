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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "turbseg/image.hpp"

namespace turbseg {

/// How a frame where both prediction and ground truth are empty is scored.
enum class EmptyPolicy {
  one,   // perfect agreement (default)
  zero,
  skip,  // frame excluded from the mean
};

std::string_view to_string(EmptyPolicy p);
EmptyPolicy parse_empty_policy(std::string_view s);

struct FrameScore {
  double iou = 0.0;
  double dice = 0.0;
};

struct PixelCounts {
  std::size_t pred = 0;
  std::size_t gt = 0;
  std::size_t inter = 0;
};

PixelCounts count_overlap(const BinaryMask& pred, const BinaryMask& gt);

/// |pred & gt| / |pred | gt|. Both empty scores 1.0.
double frame_iou(const BinaryMask& pred, const BinaryMask& gt);
/// 2|pred & gt| / (|pred| + |gt|). Both empty scores 1.0.
double frame_dice(const BinaryMask& pred, const BinaryMask& gt);

/// Scores one frame under `policy`; nullopt when the frame is skipped.
std::optional<FrameScore> score_frame(const BinaryMask& pred, const BinaryMask& gt,
                                      EmptyPolicy policy = EmptyPolicy::one);

struct VideoScore {
  std::string name;
  double miou = 0.0;
  double mdice = 0.0;
  std::size_t frames = 0;
};

struct EvalReport {
  std::vector<VideoScore> videos;
  double final_miou = 0.0;
  double final_mdice = 0.0;
  EmptyPolicy empty_policy = EmptyPolicy::one;

  std::string to_json() const;
  /// Fixed-width text table: one row per video, then "Final evaluation".
  std::string to_table() const;
};

struct VideoFrames {
  std::string name;
  std::vector<FrameScore> frames;
};

/// Mean over frames per video, then unweighted mean over videos.
EvalReport aggregate(const std::vector<VideoFrames>& videos,
                     EmptyPolicy policy = EmptyPolicy::one);

/// Scores aligned prediction/ground-truth sequences of one video.
VideoFrames score_video(std::string name, const std::vector<BinaryMask>& pred,
                        const std::vector<BinaryMask>& gt, EmptyPolicy policy);

}  // namespace turbseg
