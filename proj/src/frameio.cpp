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

#include "turbseg/frameio.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace turbseg {

namespace {

std::uint32_t load_u32le(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
         std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

std::uint32_t load_u32be(const std::uint8_t* p) {
  return std::uint32_t(p[3]) | std::uint32_t(p[2]) << 8 |
         std::uint32_t(p[1]) << 16 | std::uint32_t(p[0]) << 24;
}

void store_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 24));
}

struct PngImage {
  png_image image{};
  PngImage() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

// Decodes to either 1 (gray) or 3 (RGB) channels.
std::vector<std::uint8_t> decode_png(const std::vector<std::uint8_t>& bytes,
                                     const std::string& name, int& width,
                                     int& height, int& channels) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(),
                                        bytes.size())) {
    throw FormatError(name + ": unreadable PNG (" + png.image.message + ")");
  }
  const bool color = (png.image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  channels = color ? 3 : 1;
  width = static_cast<int>(png.image.width);
  height = static_cast<int>(png.image.height);
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, pixels.data(), 0, nullptr)) {
    throw FormatError(name + ": unreadable PNG (" + png.image.message + ")");
  }
  return pixels;
}

std::vector<std::uint8_t> encode_png(const std::uint8_t* pixels, int width,
                                     int height, bool color) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(width);
  png.image.height = static_cast<png_uint_32>(height);
  png.image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, pixels, 0,
                                 nullptr)) {
    throw FormatError(std::string("PNG encode failed: ") + png.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, pixels, 0,
                                 nullptr)) {
    throw FormatError(std::string("PNG encode failed: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

Frame decode_frame(const std::vector<std::uint8_t>& bytes,
                   const std::string& name) {
  int w = 0, h = 0, c = 0;
  auto px = decode_png(bytes, name, w, h, c);
  Frame f(w, h);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = c == 1 ? px[i] : luma(px[3 * i], px[3 * i + 1], px[3 * i + 2]);
  }
  return f;
}

}  // namespace

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const int scaled = 299 * r + 587 * g + 114 * b;
  return static_cast<std::uint8_t>(std::min(255, (scaled + 500) / 1000));
}

std::optional<long long> frame_index_from_name(std::string_view filename) {
  auto end = filename.find_last_of("0123456789");
  if (end == std::string_view::npos) return std::nullopt;
  auto begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(filename[begin - 1]))) {
    --begin;
  }
  auto digits = filename.substr(begin, end - begin + 1);
  // Clip absurdly long digit runs rather than overflow.
  if (digits.size() > 18) digits = digits.substr(digits.size() - 18);
  return std::stoll(std::string(digits));
}

bool match_pattern(std::string_view pattern, std::string_view name) {
  std::size_t p = 0, n = 0, star = std::string_view::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<fs::path> list_frame_files(const fs::path& directory,
                                       std::string_view pattern) {
  if (!fs::is_directory(directory)) {
    throw FormatError("not a directory: " + directory.string());
  }
  struct Entry {
    long long index;
    std::string name;
    fs::path path;
  };
  std::vector<Entry> entries;
  for (const auto& de : fs::directory_iterator(directory)) {
    if (!de.is_regular_file()) continue;
    auto name = de.path().filename().string();
    if (!match_pattern(pattern, name)) continue;
    entries.push_back({frame_index_from_name(name).value_or(-1), name, de.path()});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.index != b.index ? a.index < b.index : a.name < b.name;
  });
  std::vector<fs::path> out;
  out.reserve(entries.size());
  for (auto& e : entries) out.push_back(std::move(e.path));
  return out;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

Frame read_frame(const fs::path& path) {
  return decode_frame(read_bytes(path), path.string());
}

void write_frame(const Frame& frame, const fs::path& path) {
  write_bytes(encode_png_gray(frame), path);
}

std::vector<Frame> load_frame_sequence(const fs::path& directory,
                                       std::string_view pattern) {
  auto files = list_frame_files(directory, pattern);
  if (files.empty()) {
    throw FormatError("no frames matched '" + std::string(pattern) + "' in " +
                      directory.string());
  }
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) {
    frames.push_back(read_frame(f));
    if (!frames.back().same_shape(frames.front())) {
      throw FormatError("frame dimension mismatch: " + f.string() + " is " +
                        std::to_string(frames.back().width()) + "x" +
                        std::to_string(frames.back().height()) + ", expected " +
                        std::to_string(frames.front().width()) + "x" +
                        std::to_string(frames.front().height()));
    }
  }
  return frames;
}

BinaryMask read_mask(const fs::path& path, std::optional<Dims> expected) {
  int w = 0, h = 0, c = 0;
  auto px = decode_png(read_bytes(path), path.string(), w, h, c);
  if (c != 1) throw FormatError(path.string() + ": mask must be grayscale");
  if (expected && (expected->width != w || expected->height != h)) {
    throw FormatError(path.string() + ": mask is " + std::to_string(w) + "x" +
                      std::to_string(h) + ", expected " +
                      std::to_string(expected->width) + "x" +
                      std::to_string(expected->height));
  }
  BinaryMask m(w, h);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = px[i] > 127 ? 1 : 0;
  return m;
}

void write_mask(const BinaryMask& mask, const fs::path& path) {
  Grid<std::uint8_t> out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 255 : 0;
  write_bytes(encode_png_gray(out), path);
}

std::vector<std::uint8_t> encode_png_gray(const Grid<std::uint8_t>& img) {
  return encode_png(img.values().data(), img.width(), img.height(), false);
}

std::vector<std::uint8_t> encode_png_rgb(const RgbImage& img) {
  if (img.rgb.size() != static_cast<std::size_t>(img.width) * img.height * 3) {
    throw std::invalid_argument("RGB buffer size does not match dimensions");
  }
  return encode_png(img.rgb.data(), img.width, img.height, true);
}

// ---------------------------------------------------------------- .flo

FlowField decode_flow(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12) throw FormatError("truncated flow header");
  if (std::bit_cast<float>(load_u32le(bytes.data())) != kFloMagic) {
    throw FormatError("bad flow magic");
  }
  const auto w = static_cast<std::int32_t>(load_u32le(bytes.data() + 4));
  const auto h = static_cast<std::int32_t>(load_u32le(bytes.data() + 8));
  if (w < 1 || h < 1 || w > (1 << 20) || h > (1 << 20)) {
    throw FormatError("bad flow dimensions " + std::to_string(w) + "x" +
                      std::to_string(h));
  }
  const std::size_t need = 12 + std::size_t(w) * std::size_t(h) * 8;
  if (bytes.size() < need) {
    throw FormatError("truncated flow payload: " + std::to_string(bytes.size()) +
                      " bytes, need " + std::to_string(need));
  }
  FlowField field(w, h);
  const std::uint8_t* p = bytes.data() + 12;
  for (std::size_t i = 0; i < field.size(); ++i, p += 8) {
    const float u = std::bit_cast<float>(load_u32le(p));
    const float v = std::bit_cast<float>(load_u32le(p + 4));
    if (!std::isfinite(u) || !std::isfinite(v)) {
      throw FormatError("non-finite flow value at pixel " + std::to_string(i));
    }
    field[i] = {u, v};
  }
  return field;
}

std::vector<std::uint8_t> encode_flow(const FlowField& field) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + field.size() * 8);
  store_u32le(out, std::bit_cast<std::uint32_t>(kFloMagic));
  store_u32le(out, static_cast<std::uint32_t>(field.width()));
  store_u32le(out, static_cast<std::uint32_t>(field.height()));
  for (const auto& f : field.values()) {
    if (!std::isfinite(f.u) || !std::isfinite(f.v)) {
      throw FormatError("refusing to write non-finite flow value");
    }
    store_u32le(out, std::bit_cast<std::uint32_t>(f.u));
    store_u32le(out, std::bit_cast<std::uint32_t>(f.v));
  }
  return out;
}

FlowField read_flow(const fs::path& path) {
  try {
    return decode_flow(read_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_flow(const FlowField& field, const fs::path& path) {
  write_bytes(encode_flow(field), path);
}

// ---------------------------------------------------------------- PFM

namespace {

// Reads one whitespace-delimited header token; returns the offset just past
// the single whitespace byte that terminates it.
std::string pfm_token(const std::vector<std::uint8_t>& bytes, std::size_t& pos) {
  while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
  std::string tok;
  while (pos < bytes.size() && !std::isspace(bytes[pos])) {
    tok.push_back(static_cast<char>(bytes[pos++]));
    if (tok.size() > 64) throw FormatError("bad PFM header");
  }
  if (tok.empty()) throw FormatError("bad PFM header: truncated");
  return tok;
}

}  // namespace

ScoreMap decode_pfm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  const auto magic = pfm_token(bytes, pos);
  if (magic == "PF") throw FormatError("expected grayscale PFM, got color (PF)");
  if (magic != "Pf") throw FormatError("bad PFM header: magic '" + magic + "'");
  int w = 0, h = 0;
  double scale = 0;
  try {
    std::size_t used = 0;
    auto ws = pfm_token(bytes, pos);
    w = std::stoi(ws, &used);
    if (used != ws.size()) throw FormatError("bad PFM width");
    auto hs = pfm_token(bytes, pos);
    h = std::stoi(hs, &used);
    if (used != hs.size()) throw FormatError("bad PFM height");
    auto ss = pfm_token(bytes, pos);
    scale = std::stod(ss, &used);
    if (used != ss.size()) throw FormatError("bad PFM scale");
  } catch (const std::logic_error&) {
    throw FormatError("bad PFM header: non-numeric field");
  }
  if (w < 1 || h < 1 || w > (1 << 20) || h > (1 << 20)) {
    throw FormatError("bad PFM header: dimensions");
  }
  if (scale == 0 || !std::isfinite(scale)) {
    throw FormatError("bad PFM header: scale");
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw FormatError("bad PFM header: missing terminator");
  }
  ++pos;
  const bool little = scale < 0;
  const std::size_t need = pos + std::size_t(w) * std::size_t(h) * 4;
  if (bytes.size() < need) {
    throw FormatError("truncated PFM payload: " + std::to_string(bytes.size()) +
                      " bytes, need " + std::to_string(need));
  }
  ScoreMap map(w, h);
  const std::uint8_t* p = bytes.data() + pos;
  for (int row = h - 1; row >= 0; --row) {
    for (int x = 0; x < w; ++x, p += 4) {
      const float v =
          std::bit_cast<float>(little ? load_u32le(p) : load_u32be(p));
      if (!std::isfinite(v)) {
        throw FormatError("non-finite PFM value at (" + std::to_string(x) +
                          "," + std::to_string(row) + ")");
      }
      map.at(x, row) = v;
    }
  }
  return map;
}

std::vector<std::uint8_t> encode_pfm(const ScoreMap& map) {
  const std::string header = "Pf\n" + std::to_string(map.width()) + " " +
                             std::to_string(map.height()) + "\n-1.0\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + map.size() * 4);
  for (int row = map.height() - 1; row >= 0; --row) {
    for (int x = 0; x < map.width(); ++x) {
      if (!std::isfinite(map.at(x, row))) {
        throw FormatError("refusing to write non-finite score value");
      }
      store_u32le(out, std::bit_cast<std::uint32_t>(map.at(x, row)));
    }
  }
  return out;
}

ScoreMap read_score_map(const fs::path& path) {
  try {
    return decode_pfm(read_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_score_map(const ScoreMap& map, const fs::path& path) {
  write_bytes(encode_pfm(map), path);
}

}  // namespace turbseg
