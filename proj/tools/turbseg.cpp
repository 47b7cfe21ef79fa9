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

// turbseg: command-line front end for the segmentation pipeline.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "turbseg/calibsvc.hpp"
#include "turbseg/config.hpp"
#include "turbseg/pipeline.hpp"
#include "turbseg/synth.hpp"

namespace {

turbseg::CalibService* g_service = nullptr;

void handle_signal(int) {
  if (g_service) g_service->stop();
}

struct Common {
  std::string config;
  std::string stage;
  std::string dump;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c, bool with_stage) {
  cmd->add_option("--config", c.config, "Pipeline config (TOML)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Override the config seed");
  cmd->add_option("--dump-intermediates", c.dump, "Directory for intermediate stage outputs");
  if (with_stage) {
    cmd->add_option("--stage", c.stage,
                    "Start from this stage using dumped intermediates "
                    "(cues, fusion, propose, temporal, refine)");
  }
}

turbseg::RunOptions options_from(const Common& c) {
  turbseg::RunOptions o;
  if (!c.stage.empty()) o.from = turbseg::parse_stage(c.stage);
  if (!c.dump.empty()) o.dump = c.dump;
  o.seed = c.seed;
  return o;
}

void print_summary(const turbseg::RunResult& r) {
  std::size_t raw = 0, kept = 0, final_count = 0;
  for (const auto& f : r.raw_boxes) raw += f.size();
  for (const auto& f : r.filtered_boxes) kept += f.size();
  for (const auto& f : r.final_boxes) final_count += f.size();
  std::cout << r.length << " frames; boxes raw " << raw << ", after filter " << kept
            << ", after recovery " << final_count << "\n";
  if (r.report) std::cout << r.report->to_table();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Training-free multi-cue dynamic object segmentation"};
  app.require_subcommand(1);

  Common run_opts, cues_opts, propose_opts, refine_opts, eval_opts, serve_opts;
  auto* run = app.add_subcommand("run", "Run the full pipeline");
  add_common(run, run_opts, true);
  auto* cues = app.add_subcommand("cues", "Compute and dump cue maps only");
  add_common(cues, cues_opts, false);
  auto* propose = app.add_subcommand("propose", "Run through box proposals and temporal filtering");
  add_common(propose, propose_opts, true);
  auto* refine = app.add_subcommand("refine", "Refine dumped prompts into final masks");
  add_common(refine, refine_opts, false);

  auto* eval = app.add_subcommand("eval", "Score predicted masks against ground truth");
  add_common(eval, eval_opts, false);
  std::string pred_dir;
  eval->add_option("--pred", pred_dir, "Predicted mask directory (default: output.masks)");

  auto* serve = app.add_subcommand("serve", "Start the calibration service");
  add_common(serve, serve_opts, false);
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)");

  auto* synth = app.add_subcommand("synth", "Write a synthetic turbulent test sequence");
  std::string synth_out;
  turbseg::SynthParams sp;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--frames", sp.frames, "Sequence length");
  synth->add_option("--seed", sp.seed, "Generator seed");
  synth->add_option("--jitter", sp.jitter_sigma, "Warp displacement std (px)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const std::filesystem::path out = synth_out;
      turbseg::write_sequence(turbseg::make_turbulent_sequence(sp), out / "frames", out / "truth");
      turbseg::PipelineConfig cfg;
      cfg.frames = "frames";
      cfg.masks = "masks";
      cfg.dump = "dump";
      cfg.video = "synthetic";
      cfg.eval.ground_truth = "truth";
      turbseg::save_config(cfg, out / "config.toml");
      std::cout << "wrote " << sp.frames << " frames and config to " << out << "\n";
      return 0;
    }
    if (*run || *propose || *cues || *refine) {
      Common& c = *run ? run_opts : *propose ? propose_opts : *cues ? cues_opts : refine_opts;
      auto cfg = turbseg::load_config(c.config);
      auto opts = options_from(c);
      if (*cues) opts.until = turbseg::Stage::cues;
      if (*propose) opts.until = turbseg::Stage::temporal;
      if (*refine) opts.from = turbseg::Stage::refine;
      print_summary(turbseg::run_pipeline(cfg, opts));
      return 0;
    }
    if (*eval) {
      auto cfg = turbseg::load_config(eval_opts.config);
      const auto dir = pred_dir.empty() ? cfg.resolve(cfg.masks) : std::filesystem::path(pred_dir);
      const auto report = turbseg::evaluate_directory(cfg, dir);
      std::cout << report.to_table();
      const auto json = report.to_json();
      turbseg::write_bytes({json.begin(), json.end()}, cfg.resolve(cfg.report) / "eval.json");
      return 0;
    }
    if (*serve) {
      auto cfg = turbseg::load_config(serve_opts.config);
      std::optional<std::filesystem::path> dump;
      if (!serve_opts.dump.empty()) dump = serve_opts.dump;
      turbseg::CalibService service(cfg, std::filesystem::absolute(serve_opts.config), dump);
      const int bound = service.bind(host, port);
      g_service = &service;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      std::cout << "calibration service on http://" << host << ":" << bound << "\n" << std::flush;
      service.serve();
      g_service = nullptr;
      return 0;
    }
  } catch (const turbseg::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
