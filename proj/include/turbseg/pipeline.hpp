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
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "turbseg/config.hpp"
#include "turbseg/cues.hpp"
#include "turbseg/frameio.hpp"
#include "turbseg/metrics.hpp"
#include "turbseg/temporal.hpp"

namespace turbseg {

/// Pipeline stages in execution order. A run may start at any stage after
/// `cues` by reading the intermediates a previous run dumped.
enum class Stage { cues, fusion, propose, temporal, refine, eval };

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view s);

/// Error tagged with the stage (and frame, when known) that failed.
class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, std::optional<int> frame, const std::string& what);
  Stage stage() const { return stage_; }
  std::optional<int> frame() const { return frame_; }

 private:
  Stage stage_;
  std::optional<int> frame_;
};

struct RunOptions {
  Stage from = Stage::cues;
  Stage until = Stage::eval;
  /// Overrides PipelineConfig::dump.
  std::optional<std::filesystem::path> dump;
  std::optional<std::uint64_t> seed;
  /// Skip writing masks/report (used by in-process callers).
  bool write_outputs = true;
};

struct RunResult {
  int length = 0;
  BoxTable raw_boxes;
  BoxTable filtered_boxes;
  BoxTable final_boxes;
  std::vector<BinaryMask> masks;
  std::optional<EvalReport> report;
};

/// Layout of dumped intermediates under one directory.
struct DumpLayout {
  std::filesystem::path root;

  std::filesystem::path cues() const { return root / "cues"; }
  std::filesystem::path cue(CueRole role, int t) const;
  std::filesystem::path score(int t) const;
  std::filesystem::path overlay(int t) const;
  std::filesystem::path raw_boxes() const { return root / "boxes_raw.jsonl"; }
  std::filesystem::path filtered_boxes() const { return root / "boxes_filtered.jsonl"; }
  std::filesystem::path prompts() const { return root / "prompts.jsonl"; }
};

/// Per-frame proposal path shared by the batch pipeline and the calibration
/// service.
struct FrameProposal {
  ScoreMap score;
  BinaryMask mask;
  std::vector<BoxProposal> boxes;
};

FrameProposal propose_frame(const CueBundle& bundle, const FusionConfig& fusion,
                            const ProposalParams& params);

/// Frame in gray, mask pixels blended 50% toward red, boxes as 1-px green
/// outlines.
RgbImage render_overlay(const Frame& frame, const BinaryMask& mask,
                        const std::vector<BoxProposal>& boxes);

/// Gray rendering of a [0,1] map.
Grid<std::uint8_t> render_heatmap(const ScoreMap& map);

/// Output mask file for frame t (frame_{t:06}.png).
std::filesystem::path mask_path(const std::filesystem::path& dir, int t);

/// Runs stages [from, until]. Every failure surfaces as a StageError.
RunResult run_pipeline(const PipelineConfig& cfg, const RunOptions& opts = {});

/// Scores a directory of predicted masks against the configured ground truth.
EvalReport evaluate_directory(const PipelineConfig& cfg,
                              const std::filesystem::path& pred_dir,
                              std::string_view pred_pattern = "*.png");

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace turbseg
