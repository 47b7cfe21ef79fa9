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
#include <random>
#include <string>
#include <utility>

#include "turbseg/config.hpp"
#include "turbseg/image.hpp"
#include "turbseg/synth.hpp"

namespace turbseg::testing {

/// Unique temporary directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

/// Message of the exception of type E thrown by f, or "<no throw>".
template <typename E, typename F>
std::string error_message(F&& f) {
  try {
    std::forward<F>(f)();
  } catch (const E& e) {
    return e.what();
  }
  return "<no throw>";
}

BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double density);
ScoreMap random_map(std::mt19937_64& rng, int w, int h, float lo = 0.f, float hi = 1.f);
Frame random_frame(std::mt19937_64& rng, int w, int h);

/// Box-filtered random texture, so block matching has structure at every
/// pyramid level.
Frame textured_frame(std::uint64_t seed, int w, int h);

/// b(x, y) = a(x - dx, y - dy) with wrap-around.
Frame shift_wrap(const Frame& a, int dx, int dy);

/// Writes the synthetic sequence under `dir` (frames/, truth/) and returns a
/// config pointing at it with fallback refine and evaluation enabled.
PipelineConfig synthetic_setup(const std::filesystem::path& dir, const SynthParams& params);

/// Calibrated settings for the synthetic benchmark: motion + skip-motion +
/// ViBe, or motion alone.
void use_multi_cue(PipelineConfig& cfg);
void use_motion_only(PipelineConfig& cfg);

}  // namespace turbseg::testing
