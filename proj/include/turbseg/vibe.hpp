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
#include <random>
#include <vector>

#include "turbseg/image.hpp"

namespace turbseg {

/// Defaults follow the canonical ViBe settings (N=20, R=20, #min=2, phi=16).
struct VibeParams {
  int samples_n = 20;
  int radius_r = 20;
  int min_matches = 2;
  int subsample_phi = 16;
  std::uint64_t rng_seed = 42;

  void validate() const;
  friend bool operator==(const VibeParams&, const VibeParams&) = default;
};

/// Sample-based background model: every pixel keeps `samples_n` past
/// intensities. A pixel is background when at least `min_matches` of them lie
/// within `radius_r` of the observation. Background pixels refresh one of
/// their own samples, and one sample of a random 8-neighbour, each with
/// probability 1/phi ("conservative" update: foreground never leaks in).
class VibeModel {
 public:
  /// Seeds every reservoir from the clamped 3x3 neighbourhood of `first`.
  VibeModel(const Frame& first, const VibeParams& params);

  /// Classifies `frame` (1.0 = foreground, 0.0 = background), then updates
  /// the model. Classification of all pixels happens before any update, and
  /// the random stream is consumed in row-major pixel order, so results do
  /// not depend on traversal details.
  ScoreMap step(const Frame& frame);

  int width() const { return width_; }
  int height() const { return height_; }
  const VibeParams& params() const { return params_; }
  /// Samples of pixel (x, y); length samples_n.
  std::vector<std::uint8_t> samples(int x, int y) const;
  const std::vector<std::uint8_t>& reservoir() const { return reservoir_; }

  friend bool operator==(const VibeModel& a, const VibeModel& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ &&
           a.reservoir_ == b.reservoir_ && a.rng_ == b.rng_;
  }

 private:
  std::uint32_t uniform_below(std::uint32_t n);
  std::size_t slot(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * params_.samples_n;
  }

  int width_;
  int height_;
  VibeParams params_;
  std::vector<std::uint8_t> reservoir_;
  std::mt19937_64 rng_;
};

inline VibeModel vibe_init(const Frame& first, const VibeParams& params) {
  return VibeModel(first, params);
}

inline ScoreMap vibe_step(VibeModel& model, const Frame& frame) {
  return model.step(frame);
}

}  // namespace turbseg
