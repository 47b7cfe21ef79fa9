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
#include <memory>
#include <optional>
#include <string>

#include "turbseg/config.hpp"
#include "turbseg/pipeline.hpp"

namespace turbseg {

/// Local HTTP service for tuning fusion, proposal, and temporal parameters
/// against precomputed cue maps (see `turbseg cues`).
///
///   GET  /meta              sequence length, size, video name, GT presence
///   GET  /frames/{t}        frame t as PNG
///   GET  /cues/{role}/{t}   cue map rendered as gray PNG
///   POST /fuse              {frame, weights:{a,b,g,d}, tau, proposal:{...}}
///                           -> {boxes, mask_area, overlay_png (base64)};
///                           ?format=png returns the overlay PNG itself
///   GET  /score?frame=t&... IoU/Dice against ground truth (404 without GT)
///   GET  /config            current tunable parameters
///   PUT  /config            partial update; 422 on invalid values; the full
///                           config is written back to the TOML file
///
/// Cue bundles are loaded once and never mutated. Each request works on a
/// snapshot of the parameters taken when it arrives; only PUT /config writes.
class CalibService {
 public:
  struct Params {
    FusionConfig fusion;
    ProposalParams proposal;
    TemporalConfig temporal;
    std::optional<double> tau_box;
  };

  /// Throws when the cue dump is missing or incomplete.
  CalibService(PipelineConfig cfg, std::filesystem::path config_path,
               std::optional<std::filesystem::path> dump = std::nullopt);
  ~CalibService();
  CalibService(const CalibService&) = delete;
  CalibService& operator=(const CalibService&) = delete;

  /// Binds to host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void serve();
  void stop();

  Params params() const;
  int length() const;
  /// Same code path as the batch pipeline's fusion/proposal stage.
  FrameProposal propose(int t, const FusionConfig& fusion,
                        const ProposalParams& proposal) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace turbseg
