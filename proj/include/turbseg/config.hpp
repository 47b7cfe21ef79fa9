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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "turbseg/cues.hpp"
#include "turbseg/fusion.hpp"
#include "turbseg/metrics.hpp"
#include "turbseg/motion.hpp"
#include "turbseg/proposal.hpp"
#include "turbseg/temporal.hpp"
#include "turbseg/vibe.hpp"

namespace turbseg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The subset of TOML the pipeline config needs: [table] and [dotted.table]
// headers, bare or dotted keys, basic/literal strings, integers, floats,
// booleans, and comments. Arrays and inline tables are rejected.
namespace toml {

using Value = std::variant<bool, long long, double, std::string>;

/// Flat view: "fusion.alpha" -> 0.4.
using Document = std::map<std::string, Value>;

Document parse(std::string_view text);
std::string format_value(const Value& v);

}  // namespace toml

enum class RefineMode { fallback, external };

std::string_view to_string(RefineMode m);
RefineMode parse_refine_mode(std::string_view s);

struct RefineConfig {
  RefineMode mode = RefineMode::fallback;
  /// Unset means "use fusion.tau".
  std::optional<double> tau_box;
  std::filesystem::path prompts = "prompts.jsonl";
  std::filesystem::path refined_dir = "refined";
  /// Optional adapter command; {frames}, {prompts}, {out} are substituted.
  std::string command;
  /// Use the fallback refiner for frames the adapter did not deliver.
  bool fallback_on_missing = false;

  friend bool operator==(const RefineConfig&, const RefineConfig&) = default;
};

struct EvalConfig {
  std::filesystem::path ground_truth;  // empty: no evaluation
  std::string pattern = "*.png";
  EmptyPolicy empty_policy = EmptyPolicy::one;

  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

/// Complete behavioural surface of a pipeline run. Relative paths are
/// resolved against `base_dir` (the directory of the config file).
struct PipelineConfig {
  std::filesystem::path base_dir;

  std::filesystem::path frames;
  std::string pattern = "*.png";
  std::string video = "video";

  std::filesystem::path masks = "masks";
  std::filesystem::path report = "report";
  std::filesystem::path dump;  // empty: no intermediates

  std::uint64_t seed = 42;
  int threads = 1;

  std::filesystem::path cue_root = "cues";
  std::map<CueRole, CueSource> cues;

  FlowConfig flow;
  SkipConfig skip;
  NormConfig norm;
  VibeParams vibe;
  int vibe_warmup = 10;
  FusionConfig fusion;
  ProposalParams proposal;
  TemporalConfig temporal;
  RefineConfig refine;
  EvalConfig eval;

  PipelineConfig();

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  double tau_box() const { return refine.tau_box.value_or(fusion.tau); }
  std::vector<CueSource> cue_sources() const;
  /// Checks every sub-config invariant (not the file system).
  void validate() const;
};

PipelineConfig parse_config(std::string_view text,
                            const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
std::string to_toml(const PipelineConfig& cfg);
void save_config(const PipelineConfig& cfg, const std::filesystem::path& path);

}  // namespace turbseg
