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
#include <filesystem>
#include <vector>

#include "turbseg/image.hpp"

namespace turbseg {

/// Static textured background seen through pseudo-turbulence (an independent,
/// spatially smoothed random warp per frame) with one bright square moving at
/// constant velocity.
struct SynthParams {
  int width = 96;
  int height = 96;
  int frames = 60;
  double jitter_sigma = 1.0;  // std of per-pixel warp displacement, px
  int jitter_smooth = 2;      // box-blur radius applied to the warp field
  double noise_sigma = 2.0;   // additive sensor noise, intensity units
  int object_size = 12;
  int object_intensity = 220;
  double start_x = -10.0;
  double start_y = 30.0;
  double velocity_x = 1.2;
  double velocity_y = 0.4;
  std::uint64_t seed = 7;
};

struct SynthSequence {
  std::vector<Frame> frames;
  std::vector<BinaryMask> truth;
};

SynthSequence make_turbulent_sequence(const SynthParams& params);

/// Writes frames as frame_{t:06}.png and ground truth as mask PNGs.
void write_sequence(const SynthSequence& seq, const std::filesystem::path& frames_dir,
                    const std::filesystem::path& truth_dir);

}  // namespace turbseg
