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

#include "turbseg/config.hpp"

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "turbseg/frameio.hpp"

namespace turbseg {
namespace {

using testing::TempDir;

TEST(TomlTest, ParsesSubset) {
  const auto doc = toml::parse(R"(
# comment
seed = 7
name = "a \"quoted\" \\ path"  # trailing comment
raw = 'C:\dir'
[fusion]
alpha = 0.25
big = 1_000
neg = -3
exp = 1e-3
on = true
[cues.motion]
origin = "files"
dotted.key = false
)");
  EXPECT_EQ(std::get<long long>(doc.at("seed")), 7);
  EXPECT_EQ(std::get<std::string>(doc.at("name")), "a \"quoted\" \\ path");
  EXPECT_EQ(std::get<std::string>(doc.at("raw")), "C:\\dir");
  EXPECT_EQ(std::get<double>(doc.at("fusion.alpha")), 0.25);
  EXPECT_EQ(std::get<long long>(doc.at("fusion.big")), 1000);
  EXPECT_EQ(std::get<long long>(doc.at("fusion.neg")), -3);
  EXPECT_EQ(std::get<double>(doc.at("fusion.exp")), 1e-3);
  EXPECT_EQ(std::get<bool>(doc.at("fusion.on")), true);
  EXPECT_EQ(std::get<std::string>(doc.at("cues.motion.origin")), "files");
  EXPECT_EQ(std::get<bool>(doc.at("cues.motion.dotted.key")), false);
}

TEST(TomlTest, ErrorsCarryLineNumbers) {
  auto msg = [](const char* text) {
    return testing::error_message<ConfigError>([&] { toml::parse(text); });
  };
  EXPECT_NE(msg("a = 1\nb = [1, 2]\n").find("line 2"), std::string::npos);
  EXPECT_NE(msg("a = 1\na = 2\n").find("duplicate"), std::string::npos);
  EXPECT_NE(msg("\n\nx = \"open\n").find("line 3"), std::string::npos);
  EXPECT_NE(msg("[t\n").find("line 1"), std::string::npos);
  EXPECT_NE(msg("x = 1 2\n").find("trailing"), std::string::npos);
  EXPECT_NE(msg("x\n").find("expected key"), std::string::npos);
  EXPECT_NE(msg("x = 1__0\n").find("line 1"), std::string::npos);
}

TEST(TomlTest, FloatFormattingRoundTrips) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = double(rng() >> 11) * 0x1.0p-53 * std::pow(10.0, int(rng() % 20) - 10);
    const auto text = "x = " + toml::format_value(v) + "\n";
    ASSERT_EQ(std::get<double>(toml::parse(text).at("x")), v) << text;
  }
  EXPECT_EQ(toml::format_value(1.0), "1.0");
  EXPECT_EQ(toml::format_value(std::string("a\"b")), "\"a\\\"b\"");
}

TEST(ConfigTest, DefaultsAndOverrides) {
  const auto c = parse_config(R"(
seed = 9
[input]
frames = "frames"
[fusion]
alpha = 0.5
tau = 0.4
[cues.semantic]
origin = "none"
[refine]
tau_box = 0.6
[eval]
empty_policy = "skip"
)",
                              "/base");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.vibe.rng_seed, 9u);
  EXPECT_EQ(c.fusion.weights.alpha, 0.5);
  EXPECT_EQ(c.fusion.weights.beta, 0.3);
  EXPECT_EQ(c.fusion.tau, 0.4);
  EXPECT_EQ(c.tau_box(), 0.6);
  EXPECT_EQ(c.cues.at(CueRole::semantic).origin, CueOrigin::none);
  EXPECT_EQ(c.cues.at(CueRole::motion).origin, CueOrigin::builtin);
  EXPECT_EQ(c.eval.empty_policy, EmptyPolicy::skip);
  EXPECT_EQ(c.resolve("frames"), std::filesystem::path("/base/frames"));
  EXPECT_EQ(c.resolve("/abs"), std::filesystem::path("/abs"));
  EXPECT_EQ(PipelineConfig{}.tau_box(), PipelineConfig{}.fusion.tau);
}

TEST(ConfigTest, DefaultCueSources) {
  const PipelineConfig c;
  EXPECT_EQ(c.cues.at(CueRole::motion).origin, CueOrigin::builtin);
  EXPECT_EQ(c.cues.at(CueRole::skip_motion).origin, CueOrigin::builtin);
  EXPECT_EQ(c.cues.at(CueRole::background).origin, CueOrigin::builtin);
  EXPECT_EQ(c.cues.at(CueRole::semantic).origin, CueOrigin::files);
  EXPECT_TRUE(c.cues.at(CueRole::semantic).optional);
  EXPECT_EQ(c.seed, 42u);
}

TEST(ConfigTest, RejectsInvalid) {
  auto msg = [](const std::string& text) {
    return testing::error_message<ConfigError>([&] { parse_config(text); });
  };
  EXPECT_NE(msg("[fusion]\ngamma = -1\n").find("invalid config"), std::string::npos);
  EXPECT_NE(msg("[fusion]\ntau = 0\n").find("tau"), std::string::npos);
  EXPECT_NE(msg("[fusion]\nalhpa = 1\n").find("unknown config key 'fusion.alhpa'"),
            std::string::npos);
  EXPECT_NE(msg("[skip]\nk = 0.5\n").find("integer"), std::string::npos);
  EXPECT_NE(msg("[skip]\nk = 0\n").find("invalid config"), std::string::npos);
  EXPECT_NE(msg("[refine]\nmode = \"magic\"\n").find("magic"), std::string::npos);
  EXPECT_NE(msg("[cues.semantic]\norigin = \"builtin\"\n").find("invalid config"),
            std::string::npos);
  EXPECT_NE(msg("[proposal]\nmin_area = 99999999999\n").find("range"), std::string::npos);
  EXPECT_NE(msg("[vibe]\nmin_matches = 30\n").find("invalid config"), std::string::npos);
  EXPECT_NE(msg("[eval]\nempty_policy = \"half\"\n").find("half"), std::string::npos);
}

TEST(ConfigTest, TomlRoundTrip) {
  PipelineConfig c;
  c.frames = "in frames";
  c.video = "clip \"7\"";
  c.seed = 1234;
  c.threads = 3;
  c.fusion.weights = {0.1, 0.4, 0.0, 0.5};
  c.fusion.tau = 0.1 + 0.2;
  c.fusion.semantic_pregate = true;
  c.proposal = {16, 3, 4};
  c.temporal = {0.25, 2, false};
  c.refine.mode = RefineMode::external;
  c.refine.tau_box = 0.45;
  c.refine.command = "python3 adapter.py {frames} {prompts} {out}";
  c.cues[CueRole::semantic] = {CueRole::semantic, CueOrigin::files, "sem", NormConfig{95.5}, true};
  c.eval.ground_truth = "gt";
  c.vibe_warmup = 4;
  const auto text = to_toml(c);
  const auto back = parse_config(text);
  EXPECT_EQ(to_toml(back), text);
  EXPECT_EQ(back.fusion, c.fusion);
  EXPECT_EQ(back.proposal, c.proposal);
  EXPECT_EQ(back.temporal, c.temporal);
  EXPECT_EQ(back.refine, c.refine);
  EXPECT_EQ(back.eval, c.eval);
  EXPECT_EQ(back.cues, c.cues);
  EXPECT_EQ(back.vibe.rng_seed, 1234u);
}

TEST(ConfigTest, SaveAndLoad) {
  TempDir dir;
  PipelineConfig c;
  c.frames = "frames";
  c.fusion.weights.gamma = 0.05;
  save_config(c, dir / "run.toml");
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "run.toml.tmp"));
  const auto back = load_config(dir / "run.toml");
  EXPECT_EQ(back.fusion, c.fusion);
  EXPECT_EQ(back.base_dir, dir.path());
  EXPECT_EQ(back.resolve(back.frames), dir.path() / "frames");
  EXPECT_THROW(load_config(dir / "missing.toml"), ConfigError);
}

}  // namespace
}  // namespace turbseg
