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

#include <vector>

#include "turbseg/proposal.hpp"

namespace turbseg {

struct TemporalConfig {
  double iou_min = 0.1;
  int gap_max = 5;
  bool tail_propagate = true;

  void validate() const;
  friend bool operator==(const TemporalConfig&, const TemporalConfig&) = default;
};

/// Boxes per frame, indexed by frame.
using BoxTable = std::vector<std::vector<BoxProposal>>;

/// Intersection over union of two half-open boxes; 0 when disjoint.
double box_iou(const Box& a, const Box& b);

/// Removes boxes that overlap (IoU >= iou_min) no box in either neighbouring
/// frame. End frames consult their single neighbour; a one-frame sequence is
/// returned unchanged. Decisions read only the input table, so the filter is
/// idempotent.
BoxTable isolated_box_filter(const BoxTable& frames, const TemporalConfig& cfg);

/// Fills short holes in the table, never touching existing boxes.
///
/// Gap fill: an interior run of g <= gap_max empty frames whose flanking
/// frames hold box pairs with IoU >= iou_min receives, per such pair (matched
/// greedily by descending IoU, one-to-one), boxes linearly interpolated
/// between the pair and rounded half away from zero, scored with the smaller
/// flanking score.
///
/// Tail fill: with tail_propagate set, a trailing run of g <= gap_max empty
/// frames receives copies of the last non-empty frame's boxes.
BoxTable temporal_recovery(const BoxTable& frames, const TemporalConfig& cfg);

/// Rounds n/d half away from zero (d > 0).
int round_ratio(long long n, long long d);

}  // namespace turbseg
