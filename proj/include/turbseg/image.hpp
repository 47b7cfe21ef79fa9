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

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace turbseg {

/// Row-major 2-D grid. Base for the domain image types below; it carries no
/// semantics of its own beyond shape and storage.
struct Dims {
  int width = 0;
  int height = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};

template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw std::invalid_argument("grid dimensions must be positive, got " +
                                  std::to_string(width) + "x" +
                                  std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  Dims dims() const { return {width_, height_}; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool same_shape(const Grid& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 protected:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Grayscale frame, intensities 0..255.
class Frame : public Grid<std::uint8_t> {
 public:
  using Grid::Grid;
};

/// Per-pixel {0,1} mask.
class BinaryMask : public Grid<std::uint8_t> {
 public:
  using Grid::Grid;
  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : data_) n += v != 0;
    return n;
  }
};

/// Per-pixel confidence. Normalized maps hold values in [0,1]; raw maps only
/// need to be finite.
class ScoreMap : public Grid<float> {
 public:
  using Grid::Grid;
};

struct Flow {
  float u = 0.f;
  float v = 0.f;
  friend bool operator==(const Flow&, const Flow&) = default;
};

/// Dense displacement field in pixels.
class FlowField : public Grid<Flow> {
 public:
  using Grid::Grid;
};

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const std::string& what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument(
        what + ": dimension mismatch (" + std::to_string(a.width()) + "x" +
        std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
        std::to_string(b.height()) + ")");
  }
}

}  // namespace turbseg
