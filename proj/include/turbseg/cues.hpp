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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "turbseg/image.hpp"
#include "turbseg/motion.hpp"
#include "turbseg/vibe.hpp"

namespace turbseg {

enum class CueRole { motion, skip_motion, semantic, background };
enum class CueOrigin { builtin, files, none };

inline constexpr CueRole kAllRoles[] = {CueRole::motion, CueRole::skip_motion,
                                        CueRole::semantic, CueRole::background};

std::string_view to_string(CueRole role);
std::string_view to_string(CueOrigin origin);
CueRole parse_role(std::string_view s);
CueOrigin parse_origin(std::string_view s);

struct CueSource {
  CueRole role = CueRole::motion;
  CueOrigin origin = CueOrigin::builtin;
  /// Directory holding frame_{t:06}.pfm (and, for motion roles,
  /// flow_{src:06}_{dst:06}.flo). Empty means <cue root>/<role>.
  std::filesystem::path directory;
  /// When set, file-backed maps are treated as raw and normalized; otherwise
  /// they must already lie in [0,1].
  std::optional<NormConfig> normalization;
  /// A missing optional cue becomes an all-zero map.
  bool optional = false;

  void validate() const;
  friend bool operator==(const CueSource&, const CueSource&) = default;
};

/// The four normalized maps of one frame.
struct CueBundle {
  int t = 0;
  ScoreMap m;
  ScoreMap m_skip;
  ScoreMap p_sem;
  ScoreMap b;

  const ScoreMap& get(CueRole role) const;
  ScoreMap& get(CueRole role);
  void validate() const;
};

std::string frame_file_name(int t, std::string_view ext);  // frame_000012.pfm
std::string flow_file_name(int src, int dst);               // flow_000003_000008.flo

/// Everything needed to resolve cue sources for any frame of one sequence.
/// Built-in background maps are computed once on construction (ViBe is
/// stateful); everything else is computed or read on demand, so a context
/// can be shared read-only across threads.
class SequenceContext {
 public:
  struct Options {
    FlowConfig flow;
    SkipConfig skip;
    NormConfig norm;
    VibeParams vibe;
    /// Built-in background maps are zeroed for t < warmup.
    int vibe_warmup = 10;
    std::filesystem::path cue_root;
  };

  SequenceContext(std::vector<Frame> frames, std::vector<CueSource> sources,
                  Options options);

  int length() const { return static_cast<int>(frames_.size()); }
  Dims dims() const { return frames_.front().dims(); }
  const std::vector<Frame>& frames() const { return frames_; }
  const Options& options() const { return options_; }
  const CueSource& source(CueRole role) const;

  /// Assembles the four maps of frame t.
  CueBundle assemble(int t) const;
  ScoreMap resolve(CueRole role, int t) const;

 private:
  std::filesystem::path directory_for(const CueSource& src) const;
  ScoreMap builtin_motion(int src, int dst) const;
  std::optional<ScoreMap> load_file_cue(const CueSource& src, int t) const;

  std::vector<Frame> frames_;
  std::map<CueRole, CueSource> sources_;
  Options options_;
  std::vector<ScoreMap> background_;
};

inline CueBundle assemble_bundle(int t, const SequenceContext& ctx) {
  return ctx.assemble(t);
}

/// Sources reading every role from `<root>/<role>/frame_{t:06}.pfm`, as
/// written by the pipeline's cue dump.
std::vector<CueSource> dumped_cue_sources(const std::filesystem::path& root);

}  // namespace turbseg
