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

#include "turbseg/vibe.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace turbseg {

namespace {
constexpr int kNeighbourDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kNeighbourDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
}  // namespace

void VibeParams::validate() const {
  if (min_matches < 1) throw std::invalid_argument("vibe: min_matches must be >= 1");
  if (samples_n < min_matches) {
    throw std::invalid_argument("vibe: samples_n must be >= min_matches");
  }
  if (radius_r < 0) throw std::invalid_argument("vibe: radius_r must be >= 0");
  if (subsample_phi < 1) throw std::invalid_argument("vibe: subsample_phi must be >= 1");
}

// std::uniform_int_distribution is implementation-defined; rejection sampling
// on the raw engine keeps streams identical across standard libraries.
std::uint32_t VibeModel::uniform_below(std::uint32_t n) {
  const std::uint64_t limit = rng_.max() - rng_.max() % n;
  std::uint64_t r;
  do {
    r = rng_();
  } while (r >= limit);
  return static_cast<std::uint32_t>(r % n);
}

VibeModel::VibeModel(const Frame& first, const VibeParams& params)
    : width_(first.width()), height_(first.height()), params_(params),
      rng_(params.rng_seed) {
  params_.validate();
  reservoir_.resize(first.size() * params_.samples_n);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      auto* s = &reservoir_[slot(x, y)];
      for (int i = 0; i < params_.samples_n; ++i) {
        const int pick = static_cast<int>(uniform_below(9));
        const int nx = std::clamp(x + pick % 3 - 1, 0, width_ - 1);
        const int ny = std::clamp(y + pick / 3 - 1, 0, height_ - 1);
        s[i] = first.at(nx, ny);
      }
    }
  }
}

ScoreMap VibeModel::step(const Frame& frame) {
  if (frame.width() != width_ || frame.height() != height_) {
    throw std::invalid_argument("vibe_step: frame dimensions do not match model");
  }
  const int n = params_.samples_n;
  ScoreMap fg(width_, height_, 0.f);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const int value = frame.at(x, y);
      const auto* s = &reservoir_[slot(x, y)];
      int matches = 0;
      for (int i = 0; i < n && matches < params_.min_matches; ++i) {
        if (std::abs(value - int(s[i])) <= params_.radius_r) ++matches;
      }
      if (matches < params_.min_matches) fg.at(x, y) = 1.f;
    }
  }

  const auto phi = static_cast<std::uint32_t>(params_.subsample_phi);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (fg.at(x, y) != 0.f) continue;
      const std::uint8_t value = frame.at(x, y);
      if (uniform_below(phi) == 0) {
        reservoir_[slot(x, y) + uniform_below(n)] = value;
      }
      if (uniform_below(phi) == 0) {
        const int k = static_cast<int>(uniform_below(8));
        const int nx = std::clamp(x + kNeighbourDx[k], 0, width_ - 1);
        const int ny = std::clamp(y + kNeighbourDy[k], 0, height_ - 1);
        reservoir_[slot(nx, ny) + uniform_below(n)] = value;
      }
    }
  }
  return fg;
}

std::vector<std::uint8_t> VibeModel::samples(int x, int y) const {
  const auto* s = &reservoir_[slot(x, y)];
  return {s, s + params_.samples_n};
}

}  // namespace turbseg
