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

#include "turbseg/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "turbseg/cues.hpp"

namespace turbseg {

void FusionWeights::validate() const {
  for (double w : {alpha, beta, gamma, delta}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("fusion: weights must be finite and >= 0");
    }
  }
  if (alpha + beta + gamma + delta == 0.0) {
    throw std::invalid_argument("fusion: at least one weight must be positive");
  }
}

void FusionConfig::validate() const {
  weights.validate();
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("fusion: tau must lie in (0, 1]");
  }
  if (!(pregate_epsilon >= 0.0 && pregate_epsilon <= 1.0)) {
    throw std::invalid_argument("fusion: pregate epsilon must lie in [0, 1]");
  }
}

ScoreMap fuse(const CueBundle& bundle, const FusionWeights& w) {
  ScoreMap s(bundle.m.width(), bundle.m.height());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double sum = w.alpha * bundle.m[i] + w.beta * bundle.m_skip[i] +
                       w.gamma * bundle.p_sem[i] + w.delta * bundle.b[i];
    s[i] = static_cast<float>(std::clamp(sum, 0.0, 1.0));
  }
  return s;
}

ScoreMap fuse(const CueBundle& bundle, const FusionConfig& cfg) {
  if (!cfg.semantic_pregate) return fuse(bundle, cfg.weights);
  CueBundle gated = bundle;
  const double eps = cfg.pregate_epsilon;
  for (std::size_t i = 0; i < gated.m.size(); ++i) {
    gated.m[i] = static_cast<float>(gated.m[i] * (eps + (1.0 - eps) * gated.p_sem[i]));
  }
  return fuse(gated, cfg.weights);
}

BinaryMask binarize(const ScoreMap& s, double tau) {
  BinaryMask mask(s.width(), s.height());
  for (std::size_t i = 0; i < s.size(); ++i) mask[i] = s[i] >= tau ? 1 : 0;
  return mask;
}

}  // namespace turbseg
