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

#include "turbseg/image.hpp"

namespace turbseg {

struct CueBundle;

/// Cue weights of S = alpha*M + beta*M_skip + gamma*P_sem + delta*B.
struct FusionWeights {
  double alpha = 0.4;
  double beta = 0.3;
  double gamma = 0.2;
  double delta = 0.1;

  void validate() const;
  FusionWeights scaled(double c) const {
    return {alpha * c, beta * c, gamma * c, delta * c};
  }
  friend bool operator==(const FusionWeights&, const FusionWeights&) = default;
};

struct FusionConfig {
  FusionWeights weights;
  double tau = 0.35;
  /// Optional reading of the semantic prior as a multiplicative gate on the
  /// motion cue: M <- M * (eps + (1 - eps) * P_sem), applied before the sum.
  bool semantic_pregate = false;
  double pregate_epsilon = 0.3;

  void validate() const;
  friend bool operator==(const FusionConfig&, const FusionConfig&) = default;
};

/// Weighted cue sum clamped to [0,1].
ScoreMap fuse(const CueBundle& bundle, const FusionWeights& w);

/// fuse() preceded by the semantic pre-gate when enabled.
ScoreMap fuse(const CueBundle& bundle, const FusionConfig& cfg);

/// 1 where s >= tau.
BinaryMask binarize(const ScoreMap& s, double tau);

}  // namespace turbseg
