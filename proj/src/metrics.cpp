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

#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace turbseg {

std::string_view to_string(EmptyPolicy p) {
  switch (p) {
    case EmptyPolicy::one: return "one";
    case EmptyPolicy::zero: return "zero";
    case EmptyPolicy::skip: return "skip";
  }
  return "?";
}

EmptyPolicy parse_empty_policy(std::string_view s) {
  for (auto p : {EmptyPolicy::one, EmptyPolicy::zero, EmptyPolicy::skip}) {
    if (to_string(p) == s) return p;
  }
  throw std::invalid_argument("unknown empty-frame policy '" + std::string(s) + "'");
}

PixelCounts count_overlap(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred, gt, "metrics");
  PixelCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] != 0, g = gt[i] != 0;
    c.pred += p;
    c.gt += g;
    c.inter += p && g;
  }
  return c;
}

double frame_iou(const BinaryMask& pred, const BinaryMask& gt) {
  const auto c = count_overlap(pred, gt);
  const auto uni = c.pred + c.gt - c.inter;
  return uni == 0 ? 1.0 : double(c.inter) / double(uni);
}

double frame_dice(const BinaryMask& pred, const BinaryMask& gt) {
  const auto c = count_overlap(pred, gt);
  const auto total = c.pred + c.gt;
  return total == 0 ? 1.0 : 2.0 * double(c.inter) / double(total);
}

std::optional<FrameScore> score_frame(const BinaryMask& pred, const BinaryMask& gt,
                                      EmptyPolicy policy) {
  const auto c = count_overlap(pred, gt);
  if (c.pred == 0 && c.gt == 0) {
    switch (policy) {
      case EmptyPolicy::one: return FrameScore{1.0, 1.0};
      case EmptyPolicy::zero: return FrameScore{0.0, 0.0};
      case EmptyPolicy::skip: return std::nullopt;
    }
  }
  const double uni = double(c.pred + c.gt - c.inter);
  return FrameScore{double(c.inter) / uni,
                    2.0 * double(c.inter) / double(c.pred + c.gt)};
}

VideoFrames score_video(std::string name, const std::vector<BinaryMask>& pred,
                        const std::vector<BinaryMask>& gt, EmptyPolicy policy) {
  if (pred.size() != gt.size()) {
    throw std::invalid_argument("video '" + name + "': " +
                                std::to_string(pred.size()) + " predicted vs " +
                                std::to_string(gt.size()) + " ground-truth frames");
  }
  VideoFrames v{std::move(name), {}};
  for (std::size_t t = 0; t < pred.size(); ++t) {
    if (auto s = score_frame(pred[t], gt[t], policy)) v.frames.push_back(*s);
  }
  return v;
}

EvalReport aggregate(const std::vector<VideoFrames>& videos, EmptyPolicy policy) {
  if (videos.empty()) throw std::invalid_argument("aggregate: no videos");
  EvalReport report;
  report.empty_policy = policy;
  for (const auto& v : videos) {
    if (v.frames.empty()) {
      throw std::invalid_argument("aggregate: video '" + v.name +
                                  "' has no scored frames");
    }
    VideoScore s{v.name, 0.0, 0.0, v.frames.size()};
    for (const auto& f : v.frames) {
      s.miou += f.iou;
      s.mdice += f.dice;
    }
    s.miou /= double(v.frames.size());
    s.mdice /= double(v.frames.size());
    report.final_miou += s.miou;
    report.final_mdice += s.mdice;
    report.videos.push_back(std::move(s));
  }
  report.final_miou /= double(videos.size());
  report.final_mdice /= double(videos.size());
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["empty_policy"] = to_string(empty_policy);
  j["videos"] = nlohmann::json::array();
  for (const auto& v : videos) {
    j["videos"].push_back(
        {{"name", v.name}, {"miou", v.miou}, {"mdice", v.mdice}, {"frames", v.frames}});
  }
  j["final"] = {{"miou", final_miou}, {"mdice", final_mdice}};
  return j.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
  std::size_t name_w = std::string("Final evaluation").size();
  for (const auto& v : videos) name_w = std::max(name_w, v.name.size());
  std::string out;
  char buf[512];
  auto row = [&](const std::string& name, const char* a, const char* b) {
    std::snprintf(buf, sizeof buf, "%-*s  %9s  %9s\n", int(name_w), name.c_str(), a, b);
    out += buf;
  };
  auto num = [](double x) {
    char s[32];
    std::snprintf(s, sizeof s, "%.6f", x);
    return std::string(s);
  };
  row("Video", "mIoU", "mDice");
  out += std::string(name_w + 22, '-') + "\n";
  for (const auto& v : videos) row(v.name, num(v.miou).c_str(), num(v.mdice).c_str());
  out += std::string(name_w + 22, '-') + "\n";
  row("Final evaluation", num(final_miou).c_str(), num(final_mdice).c_str());
  out += "(empty-vs-empty frames: " + std::string(to_string(empty_policy)) + ")\n";
  return out;
}

}  // namespace turbseg
