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

#include "turbseg/motion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace turbseg {

void FlowConfig::validate() const {
  if (pyramid_levels < 1) throw std::invalid_argument("flow: pyramid_levels must be >= 1");
  if (block < 2) throw std::invalid_argument("flow: block must be >= 2");
  if (search_radius < 1) throw std::invalid_argument("flow: search_radius must be >= 1");
}

int FlowConfig::total_range() const {
  int range = 0;
  for (int l = 0; l < pyramid_levels; ++l) range += search_radius << l;
  return range;
}

void SkipConfig::validate() const {
  if (k < 1) throw std::invalid_argument("skip: k must be >= 1");
}

void NormConfig::validate() const {
  if (!(percentile > 0.0 && percentile <= 100.0)) {
    throw std::invalid_argument("norm: percentile must lie in (0, 100]");
  }
}

namespace {

struct Level {
  int width = 0;
  int height = 0;
  std::vector<float> px;

  float clamped(int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return px[static_cast<std::size_t>(y) * width + x];
  }
};

std::vector<Level> build_pyramid(const Frame& f, int levels) {
  std::vector<Level> pyr(levels);
  pyr[0].width = f.width();
  pyr[0].height = f.height();
  pyr[0].px.assign(f.values().begin(), f.values().end());
  for (int l = 1; l < levels; ++l) {
    const Level& src = pyr[l - 1];
    Level& dst = pyr[l];
    dst.width = src.width / 2;
    dst.height = src.height / 2;
    dst.px.resize(static_cast<std::size_t>(dst.width) * dst.height);
    for (int y = 0; y < dst.height; ++y) {
      for (int x = 0; x < dst.width; ++x) {
        const std::size_t i = static_cast<std::size_t>(2 * y) * src.width + 2 * x;
        dst.px[static_cast<std::size_t>(y) * dst.width + x] =
            0.25f * (src.px[i] + src.px[i + 1] + src.px[i + src.width] +
                     src.px[i + src.width + 1]);
      }
    }
  }
  return pyr;
}

struct BlockGrid {
  int nx = 0;
  int ny = 0;
  std::vector<int> u, v;  // integer offsets at this level

  BlockGrid(int width, int height, int block)
      : nx((width + block - 1) / block), ny((height + block - 1) / block),
        u(static_cast<std::size_t>(nx) * ny, 0),
        v(static_cast<std::size_t>(nx) * ny, 0) {}
};

struct Candidate {
  double sad;
  int mag2;
  int v;
  int u;

  bool better_than(const Candidate& o) const {
    if (sad != o.sad) return sad < o.sad;
    if (mag2 != o.mag2) return mag2 < o.mag2;
    if (v != o.v) return v < o.v;
    return u < o.u;
  }
};

BlockGrid match_level(const Level& a, const Level& b, int block, int radius,
                      const BlockGrid* coarser) {
  BlockGrid grid(a.width, a.height, block);
  for (int by = 0; by < grid.ny; ++by) {
    const int y0 = by * block;
    const int y1 = std::min(y0 + block, a.height);
    for (int bx = 0; bx < grid.nx; ++bx) {
      const int x0 = bx * block;
      const int x1 = std::min(x0 + block, a.width);

      int pu = 0, pv = 0;
      if (coarser) {
        const double cx = 0.5 * (x0 + x1 - 1) / 2.0;
        const double cy = 0.5 * (y0 + y1 - 1) / 2.0;
        const int cbx = std::clamp(static_cast<int>(cx / block), 0, coarser->nx - 1);
        const int cby = std::clamp(static_cast<int>(cy / block), 0, coarser->ny - 1);
        const std::size_t ci = static_cast<std::size_t>(cby) * coarser->nx + cbx;
        pu = 2 * coarser->u[ci];
        pv = 2 * coarser->v[ci];
      }

      Candidate best{std::numeric_limits<double>::infinity(), 0, 0, 0};
      for (int dv = -radius; dv <= radius; ++dv) {
        for (int du = -radius; du <= radius; ++du) {
          const int u = pu + du;
          const int v = pv + dv;
          double sad = 0.0;
          for (int y = y0; y < y1 && sad <= best.sad; ++y) {
            const float* row = &a.px[static_cast<std::size_t>(y) * a.width];
            for (int x = x0; x < x1; ++x) {
              sad += std::fabs(row[x] - b.clamped(x + u, y + v));
            }
          }
          const Candidate c{sad, u * u + v * v, v, u};
          if (c.better_than(best)) best = c;
        }
      }
      const std::size_t i = static_cast<std::size_t>(by) * grid.nx + bx;
      grid.u[i] = best.u;
      grid.v[i] = best.v;
    }
  }
  return grid;
}

}  // namespace

FlowField estimate_flow(const Frame& a, const Frame& b, const FlowConfig& cfg) {
  cfg.validate();
  require_same_shape(a, b, "estimate_flow");
  const int shrink = 1 << (cfg.pyramid_levels - 1);
  if (a.width() / shrink < cfg.block || a.height() / shrink < cfg.block) {
    throw std::invalid_argument(
        "estimate_flow: " + std::to_string(a.width()) + "x" +
        std::to_string(a.height()) + " frame is smaller than one " +
        std::to_string(cfg.block) + "px block at pyramid level " +
        std::to_string(cfg.pyramid_levels - 1));
  }

  const auto pa = build_pyramid(a, cfg.pyramid_levels);
  const auto pb = build_pyramid(b, cfg.pyramid_levels);

  std::optional<BlockGrid> grid;
  for (int l = cfg.pyramid_levels - 1; l >= 0; --l) {
    grid = match_level(pa[l], pb[l], cfg.block, cfg.search_radius,
                       grid ? &*grid : nullptr);
  }

  FlowField out(a.width(), a.height());
  const double half = 0.5 * (cfg.block - 1);
  for (int y = 0; y < a.height(); ++y) {
    const double gy = std::clamp((y - half) / cfg.block, 0.0, double(grid->ny - 1));
    const int y0 = static_cast<int>(gy);
    const int y1 = std::min(y0 + 1, grid->ny - 1);
    const double fy = gy - y0;
    for (int x = 0; x < a.width(); ++x) {
      const double gx = std::clamp((x - half) / cfg.block, 0.0, double(grid->nx - 1));
      const int x0 = static_cast<int>(gx);
      const int x1 = std::min(x0 + 1, grid->nx - 1);
      const double fx = gx - x0;
      auto lerp2 = [&](const std::vector<int>& g) {
        const double top = (1 - fx) * g[std::size_t(y0) * grid->nx + x0] +
                           fx * g[std::size_t(y0) * grid->nx + x1];
        const double bot = (1 - fx) * g[std::size_t(y1) * grid->nx + x0] +
                           fx * g[std::size_t(y1) * grid->nx + x1];
        return static_cast<float>((1 - fy) * top + fy * bot);
      };
      out.at(x, y) = {lerp2(grid->u), lerp2(grid->v)};
    }
  }
  return out;
}

ScoreMap flow_magnitude(const FlowField& field) {
  ScoreMap out(field.width(), field.height());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double u = field[i].u, v = field[i].v;
    out[i] = static_cast<float>(std::sqrt(u * u + v * v));
  }
  return out;
}

std::pair<int, int> skip_pair(int t, int k, int len) {
  if (len < 2) throw std::invalid_argument("skip_pair: sequence shorter than 2 frames");
  if (k < 1) throw std::invalid_argument("skip_pair: k must be >= 1");
  if (t < 0 || t >= len) {
    throw std::out_of_range("skip_pair: frame " + std::to_string(t) +
                            " outside [0, " + std::to_string(len) + ")");
  }
  if (t + k <= len - 1) return {t, t + k};
  if (t > 0) return {std::max(0, t - k), t};
  return {0, len - 1};
}

float percentile_value(const ScoreMap& raw, double percentile) {
  std::vector<float> v(raw.values().begin(), raw.values().end());
  const auto n = v.size();
  // p*N first so that e.g. 99*1000/100 stays exactly 990.
  auto rank = static_cast<std::size_t>(std::floor(percentile * double(n) / 100.0));
  rank = std::min(rank, n - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank), v.end());
  return v[rank];
}

ScoreMap normalize_score(const ScoreMap& raw, const NormConfig& cfg) {
  cfg.validate();
  const float p = percentile_value(raw, cfg.percentile);
  ScoreMap out(raw.width(), raw.height(), 0.f);
  if (!(p > 0.f)) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = std::clamp(raw[i] / p, 0.f, 1.f);
  }
  return out;
}

}  // namespace turbseg
