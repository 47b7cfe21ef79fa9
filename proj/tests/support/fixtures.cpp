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

#include "support/fixtures.hpp"

#include <atomic>
#include <unistd.h>

namespace turbseg::testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("turbseg_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double density) {
  BinaryMask m(w, h);
  const auto cut = static_cast<std::uint64_t>(density * double(rng.max()));
  for (auto& v : m.values()) v = rng() < cut ? 1 : 0;
  return m;
}

ScoreMap random_map(std::mt19937_64& rng, int w, int h, float lo, float hi) {
  ScoreMap m(w, h);
  for (auto& v : m.values()) {
    v = lo + (hi - lo) * static_cast<float>(double(rng() >> 11) * 0x1.0p-53);
  }
  return m;
}

Frame random_frame(std::mt19937_64& rng, int w, int h) {
  Frame f(w, h);
  for (auto& v : f.values()) v = static_cast<std::uint8_t>(rng() & 0xff);
  return f;
}

Frame textured_frame(std::uint64_t seed, int w, int h) {
  std::mt19937_64 rng(seed);
  const auto noise = random_frame(rng, w, h);
  Frame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int sum = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          sum += noise.at((x + dx + w) % w, (y + dy + h) % h);
        }
      }
      out.at(x, y) = static_cast<std::uint8_t>(sum / 9);
    }
  }
  return out;
}

Frame shift_wrap(const Frame& a, int dx, int dy) {
  const int w = a.width(), h = a.height();
  Frame b(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      b.at(x, y) = a.at(((x - dx) % w + w) % w, ((y - dy) % h + h) % h);
    }
  }
  return b;
}

PipelineConfig synthetic_setup(const std::filesystem::path& dir, const SynthParams& params) {
  write_sequence(make_turbulent_sequence(params), dir / "frames", dir / "truth");
  PipelineConfig cfg;
  cfg.base_dir = dir;
  cfg.frames = "frames";
  cfg.masks = "masks";
  cfg.report = "report";
  cfg.video = "synthetic";
  cfg.eval.ground_truth = "truth";
  return cfg;
}

void use_multi_cue(PipelineConfig& cfg) {
  cfg.fusion.weights = {0.1, 0.4, 0.0, 0.5};
  cfg.fusion.tau = 0.5;
}

void use_motion_only(PipelineConfig& cfg) {
  cfg.fusion.weights = {1.0, 0.0, 0.0, 0.0};
  cfg.fusion.tau = 0.5;
}

}  // namespace turbseg::testing
