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

#include "turbseg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>

#include "turbseg/fusion.hpp"
#include "turbseg/proposal.hpp"
#include "turbseg/refine.hpp"

namespace turbseg {

namespace fs = std::filesystem;

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::cues: return "cues";
    case Stage::fusion: return "fusion";
    case Stage::propose: return "propose";
    case Stage::temporal: return "temporal";
    case Stage::refine: return "refine";
    case Stage::eval: return "eval";
  }
  return "?";
}

Stage parse_stage(std::string_view s) {
  for (auto st : {Stage::cues, Stage::fusion, Stage::propose, Stage::temporal,
                  Stage::refine, Stage::eval}) {
    if (to_string(st) == s) return st;
  }
  throw std::invalid_argument("unknown stage '" + std::string(s) + "'");
}

namespace {

std::string stage_message(Stage stage, std::optional<int> frame,
                          const std::string& what) {
  std::string msg = "[" + std::string(to_string(stage)) + "]";
  if (frame) msg += " frame " + std::to_string(*frame);
  return msg + ": " + what;
}

}  // namespace

StageError::StageError(Stage stage, std::optional<int> frame, const std::string& what)
    : std::runtime_error(stage_message(stage, frame, what)), stage_(stage), frame_(frame) {}

fs::path DumpLayout::cue(CueRole role, int t) const {
  return cues() / std::string(to_string(role)) / frame_file_name(t, "pfm");
}
fs::path DumpLayout::score(int t) const { return root / "score" / frame_file_name(t, "pfm"); }
fs::path DumpLayout::overlay(int t) const { return root / "overlay" / frame_file_name(t, "png"); }

fs::path mask_path(const fs::path& dir, int t) { return dir / frame_file_name(t, "png"); }

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(n, 0)));
  auto body = [&](int i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) body(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  // Lowest index first, independent of scheduling.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

FrameProposal propose_frame(const CueBundle& bundle, const FusionConfig& fusion,
                            const ProposalParams& params) {
  FrameProposal fp;
  fp.score = fuse(bundle, fusion);
  fp.mask = binarize(fp.score, fusion.tau);
  fp.boxes = propose_boxes(fp.mask, fp.score, params, bundle.t);
  return fp;
}

RgbImage render_overlay(const Frame& frame, const BinaryMask& mask,
                        const std::vector<BoxProposal>& boxes) {
  require_same_shape(frame, mask, "render_overlay");
  RgbImage img{frame.width(), frame.height(), {}};
  img.rgb.resize(frame.size() * 3);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const int g = frame[i];
    if (mask[i]) {
      img.rgb[3 * i] = static_cast<std::uint8_t>((g + 255) / 2);
      img.rgb[3 * i + 1] = img.rgb[3 * i + 2] = static_cast<std::uint8_t>(g / 2);
    } else {
      img.rgb[3 * i] = img.rgb[3 * i + 1] = img.rgb[3 * i + 2] = static_cast<std::uint8_t>(g);
    }
  }
  auto paint = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
    const std::size_t i = (std::size_t(y) * img.width + x) * 3;
    img.rgb[i] = 0;
    img.rgb[i + 1] = 255;
    img.rgb[i + 2] = 0;
  };
  for (const auto& b : boxes) {
    for (int x = b.box.x0; x < b.box.x1; ++x) {
      paint(x, b.box.y0);
      paint(x, b.box.y1 - 1);
    }
    for (int y = b.box.y0; y < b.box.y1; ++y) {
      paint(b.box.x0, y);
      paint(b.box.x1 - 1, y);
    }
  }
  return img;
}

Grid<std::uint8_t> render_heatmap(const ScoreMap& map) {
  Grid<std::uint8_t> out(map.width(), map.height());
  for (std::size_t i = 0; i < map.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(map[i], 0.f, 1.f) * 255.f));
  }
  return out;
}

namespace {

template <typename F>
auto in_stage(Stage stage, std::optional<int> frame, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, frame, e.what());
  }
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::string substitute(std::string cmd, const std::string& key, const std::string& value) {
  for (auto pos = cmd.find(key); pos != std::string::npos;
       pos = cmd.find(key, pos + value.size())) {
    cmd.replace(pos, key.size(), value);
  }
  return cmd;
}

BoxTable read_box_table(const fs::path& path, int length, Stage stage) {
  auto table = in_stage(stage, std::nullopt, [&] { return import_prompts(path); });
  if (static_cast<int>(table.size()) != length) {
    throw StageError(stage, std::nullopt,
                     path.string() + " holds " + std::to_string(table.size()) +
                         " frames, expected " + std::to_string(length));
  }
  return table;
}

EvalReport score_against_ground_truth(const PipelineConfig& cfg,
                                      const std::vector<BinaryMask>& pred) {
  const auto gt_files = list_frame_files(cfg.resolve(cfg.eval.ground_truth), cfg.eval.pattern);
  if (gt_files.size() != pred.size()) {
    throw std::runtime_error("ground truth has " + std::to_string(gt_files.size()) +
                             " masks, prediction has " + std::to_string(pred.size()));
  }
  std::vector<BinaryMask> gt;
  gt.reserve(gt_files.size());
  for (const auto& f : gt_files) gt.push_back(read_mask(f, pred.front().dims()));
  return aggregate({score_video(cfg.video, pred, gt, cfg.eval.empty_policy)},
                   cfg.eval.empty_policy);
}

void write_report(const PipelineConfig& cfg, const EvalReport& report) {
  const auto dir = cfg.resolve(cfg.report);
  const auto json = report.to_json();
  const auto table = report.to_table();
  write_bytes({json.begin(), json.end()}, dir / "eval.json");
  write_bytes({table.begin(), table.end()}, dir / "eval.txt");
}

}  // namespace

RunResult run_pipeline(const PipelineConfig& config, const RunOptions& opts) {
  PipelineConfig cfg = config;
  if (opts.seed) cfg.seed = *opts.seed;
  cfg.vibe.rng_seed = cfg.seed;
  in_stage(opts.from, std::nullopt, [&] { cfg.validate(); });
  if (opts.until < opts.from) {
    throw StageError(opts.from, std::nullopt, "stage range is empty");
  }

  std::optional<DumpLayout> dump;
  if (opts.dump) dump = DumpLayout{*opts.dump};
  else if (!cfg.dump.empty()) dump = DumpLayout{cfg.resolve(cfg.dump)};
  if (!dump && (opts.from > Stage::cues || opts.until == Stage::cues)) {
    throw StageError(opts.from, std::nullopt,
                     "this stage range needs a dump directory for intermediates");
  }
  auto runs = [&](Stage s) { return opts.from <= s && s <= opts.until; };

  auto frames = in_stage(Stage::cues, std::nullopt, [&] {
    if (cfg.frames.empty()) throw ConfigError("input.frames is not set");
    return load_frame_sequence(cfg.resolve(cfg.frames), cfg.pattern);
  });
  RunResult result;
  const int len = result.length = static_cast<int>(frames.size());
  const Dims dims = frames.front().dims();

  std::vector<ScoreMap> scores(static_cast<std::size_t>(len));
  result.raw_boxes.assign(static_cast<std::size_t>(len), {});

  if (opts.from <= Stage::fusion) {
    SequenceContext::Options copts{cfg.flow, cfg.skip, cfg.norm, cfg.vibe,
                                   cfg.vibe_warmup, cfg.resolve(cfg.cue_root)};
    auto sources = opts.from == Stage::cues ? cfg.cue_sources()
                                            : dumped_cue_sources(dump->cues());
    const Stage cue_stage = opts.from == Stage::cues ? Stage::cues : Stage::fusion;
    // The context owns its frames; keep ours for overlays.
    const SequenceContext ctx = in_stage(cue_stage, std::nullopt, [&] {
      return SequenceContext(frames, sources, copts);
    });
    parallel_for(len, cfg.threads, [&](int t) {
      const auto bundle = in_stage(cue_stage, t, [&] { return ctx.assemble(t); });
      if (dump && opts.from == Stage::cues) {
        in_stage(Stage::cues, t, [&] {
          for (auto role : kAllRoles) write_score_map(bundle.get(role), dump->cue(role, t));
        });
      }
      if (!runs(Stage::fusion)) return;
      in_stage(Stage::propose, t, [&] {
        auto fp = propose_frame(bundle, cfg.fusion, cfg.proposal);
        if (dump) {
          write_score_map(fp.score, dump->score(t));
          write_bytes(encode_png_rgb(render_overlay(frames[t], fp.mask, fp.boxes)),
                      dump->overlay(t));
        }
        scores[t] = std::move(fp.score);
        result.raw_boxes[t] = std::move(fp.boxes);
      });
    });
    if (opts.until <= Stage::propose) return result;
  } else {
    parallel_for(len, cfg.threads, [&](int t) {
      in_stage(opts.from, t, [&] {
        auto s = read_score_map(dump->score(t));
        require_same_shape(s, frames[t], "dumped score map");
        if (opts.from == Stage::propose) {
          const auto mask = binarize(s, cfg.fusion.tau);
          result.raw_boxes[t] = propose_boxes(mask, s, cfg.proposal, t);
          write_bytes(encode_png_rgb(render_overlay(frames[t], mask, result.raw_boxes[t])),
                      dump->overlay(t));
        }
        scores[t] = std::move(s);
      });
    });
    if (opts.until <= Stage::propose) return result;
  }

  if (opts.from <= Stage::temporal) {
    if (opts.from == Stage::temporal) {
      result.raw_boxes = read_box_table(dump->raw_boxes(), len, Stage::temporal);
    }
    in_stage(Stage::temporal, std::nullopt, [&] {
      result.filtered_boxes = isolated_box_filter(result.raw_boxes, cfg.temporal);
      result.final_boxes = temporal_recovery(result.filtered_boxes, cfg.temporal);
      if (dump) {
        export_prompts(result.raw_boxes, dump->raw_boxes(), dims);
        export_prompts(result.filtered_boxes, dump->filtered_boxes(), dims);
        export_prompts(result.final_boxes, dump->prompts(), dims);
      }
    });
    if (opts.until == Stage::temporal) return result;
  } else {
    result.final_boxes = read_box_table(dump->prompts(), len, Stage::refine);
  }

  result.masks.resize(static_cast<std::size_t>(len));
  const double tau_box = cfg.tau_box();
  if (cfg.refine.mode == RefineMode::fallback) {
    parallel_for(len, cfg.threads, [&](int t) {
      result.masks[t] = in_stage(Stage::refine, t, [&] {
        return fallback_refine(scores[t], result.final_boxes[t], tau_box);
      });
    });
  } else {
    const auto prompts = cfg.resolve(cfg.refine.prompts);
    const auto refined_dir = cfg.resolve(cfg.refine.refined_dir);
    in_stage(Stage::refine, std::nullopt, [&] {
      export_prompts(result.final_boxes, prompts, dims);
      if (!cfg.refine.command.empty()) {
        auto cmd = substitute(cfg.refine.command, "{frames}",
                              shell_quote(cfg.resolve(cfg.frames).string()));
        cmd = substitute(cmd, "{prompts}", shell_quote(prompts.string()));
        cmd = substitute(cmd, "{out}", shell_quote(refined_dir.string()));
        if (const int rc = std::system(cmd.c_str()); rc != 0) {
          throw std::runtime_error("refiner command exited with status " +
                                   std::to_string(rc) + ": " + cmd);
        }
      }
    });
    auto imported = in_stage(Stage::refine, std::nullopt, [&] {
      return import_refined_partial(refined_dir, dims, len);
    });
    for (int t = 0; t < len; ++t) {
      if (imported[t]) {
        const double inside = containment_fraction(*imported[t], result.final_boxes[t]);
        if (inside < kContainmentAuditMin) {
          std::cerr << "warning: refined mask " << t << " has only " << inside * 100.0
                    << "% of its pixels inside the prompt boxes\n";
        }
        result.masks[t] = std::move(*imported[t]);
      } else if (cfg.refine.fallback_on_missing) {
        result.masks[t] = fallback_refine(scores[t], result.final_boxes[t], tau_box);
      } else {
        throw StageError(Stage::refine, t,
                         "refined mask missing: " +
                             (refined_dir / refined_file_name(t)).string());
      }
    }
  }

  if (opts.write_outputs) {
    const auto out_dir = cfg.resolve(cfg.masks);
    parallel_for(len, cfg.threads, [&](int t) {
      in_stage(Stage::refine, t, [&] { write_mask(result.masks[t], mask_path(out_dir, t)); });
    });
  }

  if (runs(Stage::eval) && !cfg.eval.ground_truth.empty()) {
    result.report = in_stage(Stage::eval, std::nullopt, [&] {
      return score_against_ground_truth(cfg, result.masks);
    });
    if (opts.write_outputs) {
      in_stage(Stage::eval, std::nullopt, [&] { write_report(cfg, *result.report); });
    }
  }
  return result;
}

EvalReport evaluate_directory(const PipelineConfig& cfg, const fs::path& pred_dir,
                              std::string_view pred_pattern) {
  return in_stage(Stage::eval, std::nullopt, [&] {
    if (cfg.eval.ground_truth.empty()) throw ConfigError("eval.ground_truth is not set");
    std::vector<BinaryMask> pred;
    for (const auto& f : list_frame_files(pred_dir, pred_pattern)) {
      pred.push_back(read_mask(f, pred.empty() ? std::nullopt
                                               : std::optional<Dims>(pred.front().dims())));
    }
    if (pred.empty()) throw FormatError("no predicted masks in " + pred_dir.string());
    return score_against_ground_truth(cfg, pred);
  });
}

}  // namespace turbseg
