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

#include "turbseg/temporal.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace turbseg {

void TemporalConfig::validate() const {
  if (!(iou_min >= 0.0 && iou_min <= 1.0)) {
    throw std::invalid_argument("temporal: iou_min must lie in [0, 1]");
  }
  if (gap_max < 0) throw std::invalid_argument("temporal: gap_max must be >= 0");
}

double box_iou(const Box& a, const Box& b) {
  const Box inter{std::max(a.x0, b.x0), std::max(a.y0, b.y0),
                  std::min(a.x1, b.x1), std::min(a.y1, b.y1)};
  const long long i = inter.area();
  const long long u = a.area() + b.area() - i;
  return u > 0 ? double(i) / double(u) : 0.0;
}

namespace {

double best_iou(const Box& box, const std::vector<BoxProposal>& others) {
  double best = 0.0;
  for (const auto& o : others) best = std::max(best, box_iou(box, o.box));
  return best;
}

int next_id(const std::vector<BoxProposal>& boxes) {
  int id = 0;
  for (const auto& b : boxes) id = std::max(id, b.id + 1);
  return id;
}

}  // namespace

int round_ratio(long long n, long long d) {
  const long long q = (2 * (n < 0 ? -n : n) + d) / (2 * d);
  return static_cast<int>(n < 0 ? -q : q);
}

BoxTable isolated_box_filter(const BoxTable& frames, const TemporalConfig& cfg) {
  cfg.validate();
  const int len = static_cast<int>(frames.size());
  if (len < 2) return frames;
  BoxTable out(frames.size());
  for (int t = 0; t < len; ++t) {
    for (const auto& b : frames[t]) {
      bool supported = false;
      if (t > 0 && best_iou(b.box, frames[t - 1]) >= cfg.iou_min) supported = true;
      if (t + 1 < len && best_iou(b.box, frames[t + 1]) >= cfg.iou_min) supported = true;
      if (supported) out[t].push_back(b);
    }
  }
  return out;
}

BoxTable temporal_recovery(const BoxTable& frames, const TemporalConfig& cfg) {
  cfg.validate();
  BoxTable out = frames;
  const int len = static_cast<int>(frames.size());

  int t = 0;
  while (t < len) {
    if (!frames[t].empty()) {
      ++t;
      continue;
    }
    const int start = t;
    while (t < len && frames[t].empty()) ++t;
    const int gap = t - start;
    if (gap > cfg.gap_max || start == 0) continue;

    const auto& before = frames[start - 1];
    if (t == len) {
      if (!cfg.tail_propagate) continue;
      for (int f = start; f < len; ++f) {
        for (auto b : before) {
          b.frame = f;
          out[f].push_back(b);
        }
      }
      continue;
    }

    const auto& after = frames[t];
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < before.size(); ++i) {
      for (std::size_t j = 0; j < after.size(); ++j) {
        const double iou = box_iou(before[i].box, after[j].box);
        if (iou >= cfg.iou_min) pairs.emplace_back(iou, i, j);
      }
    }
    // Highest IoU first; index order breaks ties.
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      return std::get<0>(a) > std::get<0>(b);
    });
    std::vector<bool> used_i(before.size()), used_j(after.size());
    const long long span = gap + 1;
    for (const auto& [iou, i, j] : pairs) {
      if (used_i[i] || used_j[j]) continue;
      used_i[i] = used_j[j] = true;
      const Box& a = before[i].box;
      const Box& b = after[j].box;
      auto lerp = [&](int from, int to, long long step) {
        return round_ratio(from * (span - step) + to * step, span);
      };
      for (int step = 1; step <= gap; ++step) {
        const int f = start - 1 + step;
        BoxProposal p;
        p.frame = f;
        p.box = {lerp(a.x0, b.x0, step), lerp(a.y0, b.y0, step),
                 lerp(a.x1, b.x1, step), lerp(a.y1, b.y1, step)};
        p.score = std::min(before[i].score, after[j].score);
        p.id = next_id(out[f]);
        out[f].push_back(p);
      }
    }
  }
  return out;
}

}  // namespace turbseg
