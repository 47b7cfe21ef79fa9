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

#include "turbseg/refine.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "turbseg/frameio.hpp"

namespace turbseg {

using nlohmann::json;

namespace {

void check_box(const BoxProposal& b, std::optional<Dims> bounds, int t) {
  const auto& r = b.box;
  const bool ordered = r.x0 < r.x1 && r.y0 < r.y1 && r.x0 >= 0 && r.y0 >= 0;
  const bool inside = !bounds || r.valid_in(*bounds);
  if (!ordered || !inside || !(b.score >= 0.0 && b.score <= 1.0)) {
    throw std::invalid_argument(
        "prompt box " + std::to_string(b.id) + " at frame " + std::to_string(t) +
        " is invalid: (" + std::to_string(r.x0) + "," + std::to_string(r.y0) +
        "," + std::to_string(r.x1) + "," + std::to_string(r.y1) +
        ") score " + std::to_string(b.score));
  }
}

int integer_field(const json& j, const char* key, int line) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) {
    throw FormatError("prompts line " + std::to_string(line) + ": '" + key +
                      "' must be an integer");
  }
  return v.get<int>();
}

}  // namespace

std::string encode_prompts(const BoxTable& boxes, std::optional<Dims> bounds) {
  std::string out;
  for (std::size_t t = 0; t < boxes.size(); ++t) {
    json line;
    line["frame"] = t;
    line["boxes"] = json::array();
    for (const auto& b : boxes[t]) {
      check_box(b, bounds, static_cast<int>(t));
      line["boxes"].push_back({{"id", b.id},
                               {"x0", b.box.x0},
                               {"y0", b.box.y0},
                               {"x1", b.box.x1},
                               {"y1", b.box.y1},
                               {"score", b.score}});
    }
    out += line.dump();
    out += '\n';
  }
  return out;
}

BoxTable decode_prompts(const std::string& text) {
  BoxTable table;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw FormatError("prompts line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      const int t = integer_field(j, "frame", line_no);
      if (t != static_cast<int>(table.size())) {
        throw FormatError("prompts line " + std::to_string(line_no) +
                          ": expected frame " + std::to_string(table.size()) +
                          ", got " + std::to_string(t));
      }
      std::vector<BoxProposal> boxes;
      for (const auto& jb : j.at("boxes")) {
        BoxProposal b;
        b.frame = t;
        b.id = integer_field(jb, "id", line_no);
        b.box = {integer_field(jb, "x0", line_no), integer_field(jb, "y0", line_no),
                 integer_field(jb, "x1", line_no), integer_field(jb, "y1", line_no)};
        b.score = jb.at("score").get<double>();
        check_box(b, std::nullopt, t);
        boxes.push_back(b);
      }
      table.push_back(std::move(boxes));
    } catch (const json::exception& e) {
      throw FormatError("prompts line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

void export_prompts(const BoxTable& boxes, const std::filesystem::path& path,
                    std::optional<Dims> bounds) {
  const auto text = encode_prompts(boxes, bounds);
  write_bytes({text.begin(), text.end()}, path);
}

BoxTable import_prompts(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return decode_prompts({bytes.begin(), bytes.end()});
}

std::string refined_file_name(int t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "refined_%06d.png", t);
  return buf;
}

std::vector<std::optional<BinaryMask>> import_refined_partial(
    const std::filesystem::path& dir, Dims expected, int len) {
  std::vector<std::optional<BinaryMask>> out(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) {
    const auto path = dir / refined_file_name(t);
    if (std::filesystem::exists(path)) out[t] = read_mask(path, expected);
  }
  return out;
}

std::vector<BinaryMask> import_refined(const std::filesystem::path& dir,
                                       Dims expected, int len) {
  std::vector<BinaryMask> out;
  out.reserve(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) {
    const auto path = dir / refined_file_name(t);
    if (!std::filesystem::exists(path)) {
      throw FormatError("refined mask for frame " + std::to_string(t) +
                        " missing: " + path.string());
    }
    out.push_back(read_mask(path, expected));
  }
  return out;
}

BinaryMask fallback_refine(const ScoreMap& s, const std::vector<BoxProposal>& boxes,
                           double tau_box) {
  BinaryMask mask(s.width(), s.height());
  for (const auto& p : boxes) {
    const Box r{std::max(0, p.box.x0), std::max(0, p.box.y0),
                std::min(s.width(), p.box.x1), std::min(s.height(), p.box.y1)};
    bool any = false;
    for (int y = r.y0; y < r.y1; ++y) {
      for (int x = r.x0; x < r.x1; ++x) {
        if (s.at(x, y) >= tau_box) {
          mask.at(x, y) = 1;
          any = true;
        }
      }
    }
    if (!any) {
      for (int y = r.y0; y < r.y1; ++y) {
        for (int x = r.x0; x < r.x1; ++x) mask.at(x, y) = 1;
      }
    }
  }
  return mask;
}

double containment_fraction(const BinaryMask& mask,
                            const std::vector<BoxProposal>& boxes) {
  std::size_t set = 0, inside = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      ++set;
      for (const auto& b : boxes) {
        if (b.box.contains(x, y)) {
          ++inside;
          break;
        }
      }
    }
  }
  return set == 0 ? 1.0 : double(inside) / double(set);
}

}  // namespace turbseg
