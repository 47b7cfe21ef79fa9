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

#include "turbseg/cues.hpp"

#include <cstdio>
#include <stdexcept>

#include "turbseg/frameio.hpp"

namespace turbseg {

std::string_view to_string(CueRole role) {
  switch (role) {
    case CueRole::motion: return "motion";
    case CueRole::skip_motion: return "skip_motion";
    case CueRole::semantic: return "semantic";
    case CueRole::background: return "background";
  }
  return "?";
}

std::string_view to_string(CueOrigin origin) {
  switch (origin) {
    case CueOrigin::builtin: return "builtin";
    case CueOrigin::files: return "files";
    case CueOrigin::none: return "none";
  }
  return "?";
}

CueRole parse_role(std::string_view s) {
  for (auto r : kAllRoles) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown cue role '" + std::string(s) + "'");
}

CueOrigin parse_origin(std::string_view s) {
  for (auto o : {CueOrigin::builtin, CueOrigin::files, CueOrigin::none}) {
    if (to_string(o) == s) return o;
  }
  throw std::invalid_argument("unknown cue origin '" + std::string(s) + "'");
}

void CueSource::validate() const {
  if (role == CueRole::semantic && origin == CueOrigin::builtin) {
    throw std::invalid_argument(
        "cues: the semantic prior has no built-in source; use files or none");
  }
  if (normalization) normalization->validate();
}

const ScoreMap& CueBundle::get(CueRole role) const {
  switch (role) {
    case CueRole::motion: return m;
    case CueRole::skip_motion: return m_skip;
    case CueRole::semantic: return p_sem;
    case CueRole::background: return b;
  }
  throw std::logic_error("bad cue role");
}

ScoreMap& CueBundle::get(CueRole role) {
  return const_cast<ScoreMap&>(std::as_const(*this).get(role));
}

void CueBundle::validate() const {
  for (auto role : kAllRoles) {
    const auto& map = get(role);
    require_same_shape(map, m, "cue bundle");
    for (float v : map.values()) {
      if (!(v >= 0.f && v <= 1.f)) {
        throw std::invalid_argument("cue bundle: " + std::string(to_string(role)) +
                                    " value " + std::to_string(v) +
                                    " outside [0,1] at frame " + std::to_string(t));
      }
    }
  }
}

std::string frame_file_name(int t, std::string_view ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d.", t);
  return buf + std::string(ext);
}

std::string flow_file_name(int src, int dst) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "flow_%06d_%06d.flo", src, dst);
  return buf;
}

std::vector<CueSource> dumped_cue_sources(const std::filesystem::path& root) {
  std::vector<CueSource> out;
  for (auto role : kAllRoles) {
    out.push_back({role, CueOrigin::files, root / std::string(to_string(role)),
                   std::nullopt, false});
  }
  return out;
}

SequenceContext::SequenceContext(std::vector<Frame> frames,
                                 std::vector<CueSource> sources,
                                 Options options)
    : frames_(std::move(frames)), options_(std::move(options)) {
  if (frames_.empty()) throw std::invalid_argument("cues: empty frame sequence");
  for (const auto& f : frames_) require_same_shape(f, frames_.front(), "cues");
  for (auto& s : sources) {
    s.validate();
    sources_[s.role] = std::move(s);
  }
  for (auto role : kAllRoles) {
    if (!sources_.count(role)) {
      throw std::invalid_argument("cues: no source declared for role " +
                                  std::string(to_string(role)));
    }
  }
  options_.flow.validate();
  options_.skip.validate();
  options_.norm.validate();

  if (sources_.at(CueRole::background).origin == CueOrigin::builtin) {
    VibeModel model(frames_.front(), options_.vibe);
    background_.reserve(frames_.size());
    for (int t = 0; t < length(); ++t) {
      auto b = model.step(frames_[t]);
      if (t < options_.vibe_warmup) b = ScoreMap(b.width(), b.height(), 0.f);
      background_.push_back(std::move(b));
    }
  }
}

const CueSource& SequenceContext::source(CueRole role) const {
  return sources_.at(role);
}

std::filesystem::path SequenceContext::directory_for(const CueSource& src) const {
  if (!src.directory.empty()) return src.directory;
  return options_.cue_root / std::string(to_string(src.role));
}

ScoreMap SequenceContext::builtin_motion(int src, int dst) const {
  return normalize_score(
      flow_magnitude(estimate_flow(frames_[src], frames_[dst], options_.flow)),
      options_.norm);
}

std::optional<ScoreMap> SequenceContext::load_file_cue(const CueSource& src,
                                                       int t) const {
  const auto dir = directory_for(src);
  const auto pfm = dir / frame_file_name(t, "pfm");
  if (std::filesystem::exists(pfm)) {
    auto map = read_score_map(pfm);
    require_same_shape(map, frames_.front(), pfm.string());
    if (src.normalization) return normalize_score(map, *src.normalization);
    for (float v : map.values()) {
      if (!(v >= 0.f && v <= 1.f)) {
        throw FormatError(pfm.string() + ": value " + std::to_string(v) +
                          " outside [0,1]");
      }
    }
    return map;
  }
  if (src.role == CueRole::motion || src.role == CueRole::skip_motion) {
    const int k = src.role == CueRole::motion ? 1 : options_.skip.k;
    const auto [a, b] = skip_pair(t, k, length());
    const auto flo = dir / flow_file_name(a, b);
    if (std::filesystem::exists(flo)) {
      auto field = read_flow(flo);
      require_same_shape(field, frames_.front(), flo.string());
      return normalize_score(flow_magnitude(field),
                             src.normalization.value_or(options_.norm));
    }
  }
  return std::nullopt;
}

ScoreMap SequenceContext::resolve(CueRole role, int t) const {
  if (t < 0 || t >= length()) {
    throw std::out_of_range("cues: frame " + std::to_string(t) + " out of range");
  }
  const auto& src = sources_.at(role);
  const auto [w, h] = dims();
  switch (src.origin) {
    case CueOrigin::none:
      return ScoreMap(w, h, 0.f);
    case CueOrigin::builtin:
      if (role == CueRole::background) return background_[t];
      {
        const int k = role == CueRole::motion ? 1 : options_.skip.k;
        const auto [a, b] = skip_pair(t, k, length());
        return builtin_motion(a, b);
      }
    case CueOrigin::files:
      if (auto map = load_file_cue(src, t)) return std::move(*map);
      if (src.optional) return ScoreMap(w, h, 0.f);
      throw FormatError("required cue '" + std::string(to_string(role)) +
                        "' missing for frame " + std::to_string(t) + " in " +
                        directory_for(src).string());
  }
  throw std::logic_error("bad cue origin");
}

CueBundle SequenceContext::assemble(int t) const {
  CueBundle bundle;
  bundle.t = t;
  for (auto role : kAllRoles) bundle.get(role) = resolve(role, t);
  bundle.validate();
  return bundle;
}

}  // namespace turbseg
