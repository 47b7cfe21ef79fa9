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

#include "turbseg/calibsvc.hpp"

#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "support/fixtures.hpp"

namespace turbseg {
namespace {

using nlohmann::json;
using testing::TempDir;

SynthParams tiny_synth() {
  SynthParams p;
  p.width = 40;
  p.height = 40;
  p.frames = 8;
  p.object_size = 8;
  p.start_x = 4;
  p.start_y = 12;
  return p;
}

class CalibServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    cfg_ = testing::synthetic_setup(dir_.path(), tiny_synth());
    cfg_.vibe_warmup = 2;
    cfg_.dump = "dump";
    save_config(cfg_, dir_ / "run.toml");
    RunOptions cues_only;
    cues_only.until = Stage::cues;
    run_pipeline(cfg_, cues_only);
    service_ = std::make_unique<CalibService>(cfg_, dir_ / "run.toml");
    port_ = service_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { service_->serve(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 200 && !client_->Get("/meta"); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }

  void TearDown() override {
    service_->stop();
    thread_.join();
  }

  json get_json(const std::string& path, int expect = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << ": " << res->body;
    return json::parse(res->body);
  }

  TempDir dir_;
  PipelineConfig cfg_;
  std::unique_ptr<CalibService> service_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(CalibServiceTest, Meta) {
  const auto j = get_json("/meta");
  EXPECT_EQ(j["frames"], 8);
  EXPECT_EQ(j["width"], 40);
  EXPECT_EQ(j["height"], 40);
  EXPECT_EQ(j["videos"][0], "synthetic");
  EXPECT_EQ(j["ground_truth"], true);
  EXPECT_EQ(service_->length(), 8);
}

TEST_F(CalibServiceTest, FrameAndCuePngs) {
  auto res = client_->Get("/frames/5");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "image/png");
  const auto frames = load_frame_sequence(dir_ / "frames");
  const auto png = encode_png_gray(frames[5]);
  EXPECT_EQ(res->body, std::string(png.begin(), png.end()));
  res = client_->Get("/cues/skip_motion/3");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto heat = encode_png_gray(
      render_heatmap(read_score_map(DumpLayout{dir_ / "dump"}.cue(CueRole::skip_motion, 3))));
  EXPECT_EQ(res->body, std::string(heat.begin(), heat.end()));
  EXPECT_EQ(client_->Get("/frames/8")->status, 404);
  EXPECT_EQ(client_->Get("/cues/colour/1")->status, 404);
}

TEST_F(CalibServiceTest, FuseMatchesBatchPath) {
  auto batch = cfg_;
  batch.fusion.weights = {1, 0, 0, 0};
  batch.fusion.tau = 0.5;
  batch.dump = "batch_dump";
  RunOptions until_propose;
  until_propose.until = Stage::propose;
  const auto r = run_pipeline(batch, until_propose);
  const auto overlay = read_bytes(DumpLayout{dir_ / "batch_dump"}.overlay(5));

  const std::string body = R"({"frame":5,"weights":{"a":1,"b":0,"g":0,"d":0},"tau":0.5})";
  auto res = client_->Post("/fuse?format=png", body, "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  EXPECT_EQ(res->body, std::string(overlay.begin(), overlay.end()));

  res = client_->Post("/fuse", body, "application/json");
  ASSERT_TRUE(res);
  const auto j = json::parse(res->body);
  EXPECT_EQ(j["overlay_png"],
            httplib::detail::base64_encode(std::string(overlay.begin(), overlay.end())));
  ASSERT_EQ(j["boxes"].size(), r.raw_boxes[5].size());
  for (std::size_t i = 0; i < r.raw_boxes[5].size(); ++i) {
    EXPECT_EQ(j["boxes"][i]["x0"], r.raw_boxes[5][i].box.x0);
    EXPECT_EQ(j["boxes"][i]["score"], r.raw_boxes[5][i].score);
  }

  // The in-process call shares the implementation with the batch stage.
  const auto fp = service_->propose(5, batch.fusion, batch.proposal);
  const auto m5 = read_score_map(DumpLayout{dir_ / "dump"}.cue(CueRole::motion, 5));
  EXPECT_EQ(fp.mask, binarize(m5, 0.5));
  EXPECT_EQ(j["mask_area"], fp.mask.count());
}

TEST_F(CalibServiceTest, FuseRejectsBadInput) {
  EXPECT_EQ(client_->Post("/fuse", "{", "application/json")->status, 400);
  EXPECT_EQ(client_->Post("/fuse", R"({"weights":{}})", "application/json")->status, 422);
  EXPECT_EQ(client_->Post("/fuse", R"({"frame":99})", "application/json")->status, 404);
  EXPECT_EQ(client_->Post("/fuse", R"({"frame":1,"tau":0})", "application/json")->status, 422);
  EXPECT_EQ(
      client_->Post("/fuse", R"({"frame":1,"proposal":{"min_area":1.5}})", "application/json")
          ->status,
      422);
}

TEST_F(CalibServiceTest, Score) {
  const auto j = get_json("/score?frame=6&a=0&b=0.4&g=0&d=0.6&tau=0.5");
  EXPECT_GE(j["proposal"]["iou"].get<double>(), 0.0);
  EXPECT_LE(j["refined"]["dice"].get<double>(), 1.0);
  EXPECT_EQ(client_->Get("/score?frame=1&tau=x")->status, 422);
  EXPECT_EQ(client_->Get("/score")->status, 422);
}

TEST_F(CalibServiceTest, ConfigRoundTripAndPersistence) {
  auto j = get_json("/config");
  EXPECT_EQ(j["fusion"]["alpha"], cfg_.fusion.weights.alpha);
  EXPECT_TRUE(j["refine"]["tau_box"].is_null());

  auto res = client_->Put("/config",
                          R"({"fusion":{"gamma":0.05,"tau":0.45},"proposal":{"margin":2},)"
                          R"("temporal":{"gap_max":3},"refine":{"tau_box":0.6}})",
                          "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  j = get_json("/config");
  EXPECT_EQ(j["fusion"]["gamma"], 0.05);
  EXPECT_EQ(j["fusion"]["tau"], 0.45);
  EXPECT_EQ(j["fusion"]["beta"], cfg_.fusion.weights.beta);
  EXPECT_EQ(j["proposal"]["margin"], 2);
  EXPECT_EQ(j["temporal"]["gap_max"], 3);
  EXPECT_EQ(j["refine"]["tau_box"], 0.6);
  EXPECT_EQ(service_->params().fusion.weights.gamma, 0.05);

  const auto saved = load_config(dir_ / "run.toml");
  EXPECT_EQ(saved.fusion.weights.gamma, 0.05);
  EXPECT_EQ(saved.fusion.tau, 0.45);
  EXPECT_EQ(saved.proposal.margin, 2);
  EXPECT_EQ(saved.temporal.gap_max, 3);
  EXPECT_EQ(saved.refine.tau_box, 0.6);
  EXPECT_EQ(saved.frames, cfg_.frames);
}

TEST_F(CalibServiceTest, InvalidConfigRejectedWithoutSideEffects) {
  const auto before = read_bytes(dir_ / "run.toml");
  auto res = client_->Put("/config", R"({"fusion":{"gamma":-1}})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422);
  EXPECT_NE(json::parse(res->body)["error"].get<std::string>().find("weights"),
            std::string::npos);
  EXPECT_EQ(client_->Put("/config", "not json", "application/json")->status, 400);
  EXPECT_EQ(client_->Put("/config", R"({"fusion":{"tau":"high"}})", "application/json")->status,
            422);
  EXPECT_EQ(read_bytes(dir_ / "run.toml"), before);
  EXPECT_EQ(get_json("/config")["fusion"]["gamma"], cfg_.fusion.weights.gamma);
}

TEST_F(CalibServiceTest, BusyPortRejected) {
  CalibService other(cfg_, {});
  EXPECT_THROW(other.bind("127.0.0.1", port_), std::runtime_error);
}

TEST(CalibServiceSetupTest, MissingCuesRejected) {
  TempDir dir;
  auto cfg = testing::synthetic_setup(dir.path(), tiny_synth());
  cfg.dump = "dump";
  const auto msg =
      testing::error_message<FormatError>([&] { CalibService svc(cfg, dir / "run.toml"); });
  EXPECT_NE(msg.find("turbseg cues"), std::string::npos) << msg;
}

}  // namespace
}  // namespace turbseg
