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

#include "turbseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "turbseg/cues.hpp"
#include "turbseg/frameio.hpp"
#include "turbseg/proposal.hpp"

namespace turbseg {

namespace {

// Box-Muller over the raw engine; std::normal_distribution differs between
// standard libraries.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    const double u1 = (double(rng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = double(rng_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  double uniform() { return double(rng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 rng_;
};

std::vector<double> box_blur(const std::vector<double>& in, int w, int h, int r) {
  if (r <= 0) return in;
  std::vector<double> tmp(in.size()), out(in.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0;
      int n = 0;
      for (int d = -r; d <= r; ++d) {
        const int xx = std::clamp(x + d, 0, w - 1);
        s += in[std::size_t(y) * w + xx];
        ++n;
      }
      tmp[std::size_t(y) * w + x] = s / n;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0;
      int n = 0;
      for (int d = -r; d <= r; ++d) {
        const int yy = std::clamp(y + d, 0, h - 1);
        s += tmp[std::size_t(yy) * w + x];
        ++n;
      }
      out[std::size_t(y) * w + x] = s / n;
    }
  }
  return out;
}

std::vector<double> smooth_field(Gaussian& g, int w, int h, int r, double sigma) {
  std::vector<double> f(std::size_t(w) * h);
  for (auto& v : f) v = g();
  f = box_blur(f, w, h, r);
  double ss = 0;
  for (double v : f) ss += v * v;
  const double scale = sigma / std::sqrt(ss / double(f.size()));
  for (auto& v : f) v *= scale;
  return f;
}

}  // namespace

SynthSequence make_turbulent_sequence(const SynthParams& p) {
  Gaussian g(p.seed);
  const int w = p.width, h = p.height;

  // Background: a few random plane waves plus fine-grained texture.
  std::vector<double> bg(std::size_t(w) * h, 100.0);
  for (int k = 0; k < 6; ++k) {
    const double fx = (g.uniform() - 0.5) * 0.5;
    const double fy = (g.uniform() - 0.5) * 0.5;
    const double phase = g.uniform() * 2.0 * std::numbers::pi;
    const double amp = 6.0 + 6.0 * g.uniform();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        bg[std::size_t(y) * w + x] += amp * std::sin(fx * x + fy * y + phase);
      }
    }
  }
  auto grain = smooth_field(g, w, h, 1, 6.0);
  for (std::size_t i = 0; i < bg.size(); ++i) bg[i] += grain[i];

  auto sample = [&](double x, double y) {
    x = std::clamp(x, 0.0, double(w - 1));
    y = std::clamp(y, 0.0, double(h - 1));
    const int x0 = std::min(int(x), std::max(w - 2, 0));
    const int y0 = std::min(int(y), std::max(h - 2, 0));
    const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0, fy = y - y0;
    auto at = [&](int xx, int yy) { return bg[std::size_t(yy) * w + xx]; };
    return (1 - fy) * ((1 - fx) * at(x0, y0) + fx * at(x1, y0)) +
           fy * ((1 - fx) * at(x0, y1) + fx * at(x1, y1));
  };

  SynthSequence seq;
  for (int t = 0; t < p.frames; ++t) {
    const auto dx = smooth_field(g, w, h, p.jitter_smooth, p.jitter_sigma);
    const auto dy = smooth_field(g, w, h, p.jitter_smooth, p.jitter_sigma);
    const int ox = static_cast<int>(std::lround(p.start_x + p.velocity_x * t));
    const int oy = static_cast<int>(std::lround(p.start_y + p.velocity_y * t));
    const Box obj{ox, oy, ox + p.object_size, oy + p.object_size};

    Frame f(w, h);
    BinaryMask m(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = std::size_t(y) * w + x;
        const bool on = obj.contains(x, y);
        double v = on ? p.object_intensity : sample(x + dx[i], y + dy[i]);
        v += p.noise_sigma * g();
        f[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        m[i] = on ? 1 : 0;
      }
    }
    seq.frames.push_back(std::move(f));
    seq.truth.push_back(std::move(m));
  }
  return seq;
}

void write_sequence(const SynthSequence& seq, const std::filesystem::path& frames_dir,
                    const std::filesystem::path& truth_dir) {
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    write_frame(seq.frames[t], frames_dir / frame_file_name(int(t), "png"));
    write_mask(seq.truth[t], truth_dir / frame_file_name(int(t), "png"));
  }
}

}  // namespace turbseg
