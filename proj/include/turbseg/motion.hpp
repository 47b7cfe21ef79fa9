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

#include <utility>

#include "turbseg/image.hpp"

namespace turbseg {

struct FlowConfig {
  int pyramid_levels = 3;
  int block = 8;
  int search_radius = 4;  // per level

  void validate() const;
  /// Largest displacement the estimator can express, in full-resolution px.
  int total_range() const;
  friend bool operator==(const FlowConfig&, const FlowConfig&) = default;
};

struct SkipConfig {
  int k = 5;
  void validate() const;
  friend bool operator==(const SkipConfig&, const SkipConfig&) = default;
};

struct NormConfig {
  double percentile = 99.0;
  void validate() const;
  friend bool operator==(const NormConfig&, const NormConfig&) = default;
};

/// Coarse-to-fine integer block matching.
///
/// A factor-2 box pyramid is built for both frames. Starting at the coarsest
/// level, every block of `a` searches the (2r+1)^2 integer offsets around
/// twice the coarser estimate for the lowest sum of absolute differences
/// against `b` (out-of-range samples of `b` are clamped to the border). Ties
/// go to the smaller |offset|^2, then to the smaller (v, u). The per-block
/// result at full resolution is bilinearly interpolated between block
/// centers.
FlowField estimate_flow(const Frame& a, const Frame& b, const FlowConfig& cfg);

/// Per-pixel sqrt(u^2 + v^2), unnormalized.
ScoreMap flow_magnitude(const FlowField& field);

/// Frame pair for a skip interval `k` anchored at `t` in a sequence of
/// length `len`: (t, t+k) when it fits, else the backward pair
/// (max(0, t-k), t); when that collapses at t == 0 the destination is
/// clamped to len-1.
std::pair<int, int> skip_pair(int t, int k, int len);

/// Divides by the p-th percentile (nearest rank at floor(p/100 * N), capped
/// at N-1, over ascending values) and clamps to [0,1]. A zero percentile
/// yields the zero map.
ScoreMap normalize_score(const ScoreMap& raw, const NormConfig& cfg);

/// Value selected by normalize_score as its divisor.
float percentile_value(const ScoreMap& raw, double percentile);

}  // namespace turbseg
