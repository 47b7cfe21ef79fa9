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

#include <mutex>
#include <shared_mutex>

#include <httplib.h>
#include <json.hpp>

#include "turbseg/cues.hpp"
#include "turbseg/fusion.hpp"
#include "turbseg/metrics.hpp"
#include "turbseg/refine.hpp"

namespace turbseg {

using nlohmann::json;

namespace {

// Client-side input problems map to HTTP statuses.
struct HttpError : std::runtime_error {
  int status;
  HttpError(int s, const std::string& what) : std::runtime_error(what), status(s) {}
};

json params_to_json(const CalibService::Params& p) {
  const auto& w = p.fusion.weights;
  return {
      {"fusion",
       {{"alpha", w.alpha},
        {"beta", w.beta},
        {"gamma", w.gamma},
        {"delta", w.delta},
        {"tau", p.fusion.tau},
        {"semantic_pregate", p.fusion.semantic_pregate},
        {"pregate_epsilon", p.fusion.pregate_epsilon}}},
      {"proposal",
       {{"min_area", p.proposal.min_area},
        {"margin", p.proposal.margin},
        {"connectivity", p.proposal.connectivity}}},
      {"temporal",
       {{"iou_min", p.temporal.iou_min},
        {"gap_max", p.temporal.gap_max},
        {"tail_propagate", p.temporal.tail_propagate}}},
      {"refine", {{"tau_box", p.tau_box ? json(*p.tau_box) : json(nullptr)}}},
  };
}

template <typename T>
void take(const json& obj, std::initializer_list<const char*> keys, T& out) {
  for (const char* k : keys) {
    auto it = obj.find(k);
    if (it == obj.end()) continue;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw HttpError(422, std::string("field '") + k + "' has the wrong type");
    }
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_integer()) {
        throw HttpError(422, std::string("field '") + k + "' must be an integer");
      }
    }
    return;
  }
}

void apply_weights(const json& j, FusionWeights& w) {
  if (!j.is_object()) throw HttpError(422, "weights must be an object");
  take(j, {"a", "alpha"}, w.alpha);
  take(j, {"b", "beta"}, w.beta);
  take(j, {"g", "gamma"}, w.gamma);
  take(j, {"d", "delta"}, w.delta);
}

void apply_proposal(const json& j, ProposalParams& p) {
  if (!j.is_object()) throw HttpError(422, "proposal must be an object");
  take(j, {"min_area"}, p.min_area);
  take(j, {"margin"}, p.margin);
  take(j, {"connectivity"}, p.connectivity);
}

CalibService::Params apply_update(CalibService::Params p, const json& body) {
  if (!body.is_object()) throw HttpError(422, "config body must be an object");
  if (auto it = body.find("fusion"); it != body.end()) {
    if (!it->is_object()) throw HttpError(422, "fusion must be an object");
    apply_weights(*it, p.fusion.weights);
    take(*it, {"tau"}, p.fusion.tau);
    take(*it, {"semantic_pregate"}, p.fusion.semantic_pregate);
    take(*it, {"pregate_epsilon"}, p.fusion.pregate_epsilon);
  }
  if (auto it = body.find("proposal"); it != body.end()) apply_proposal(*it, p.proposal);
  if (auto it = body.find("temporal"); it != body.end()) {
    if (!it->is_object()) throw HttpError(422, "temporal must be an object");
    take(*it, {"iou_min"}, p.temporal.iou_min);
    take(*it, {"gap_max"}, p.temporal.gap_max);
    take(*it, {"tail_propagate"}, p.temporal.tail_propagate);
  }
  if (auto it = body.find("refine"); it != body.end()) {
    if (!it->is_object()) throw HttpError(422, "refine must be an object");
    if (auto tb = it->find("tau_box"); tb != it->end()) {
      if (tb->is_null()) p.tau_box.reset();
      else if (tb->is_number()) p.tau_box = tb->get<double>();
      else throw HttpError(422, "field 'tau_box' has the wrong type");
    }
  }
  return p;
}

void validate_params(const CalibService::Params& p) {
  try {
    p.fusion.validate();
    p.proposal.validate();
    p.temporal.validate();
    if (p.tau_box && !(*p.tau_box > 0.0 && *p.tau_box <= 1.0)) {
      throw std::invalid_argument("refine: tau_box must lie in (0, 1]");
    }
  } catch (const std::invalid_argument& e) {
    throw HttpError(422, e.what());
  }
}

json boxes_to_json(const std::vector<BoxProposal>& boxes) {
  json out = json::array();
  for (const auto& b : boxes) {
    out.push_back({{"id", b.id},
                   {"x0", b.box.x0},
                   {"y0", b.box.y0},
                   {"x1", b.box.x1},
                   {"y1", b.box.y1},
                   {"score", b.score}});
  }
  return out;
}

std::string as_string(const std::vector<std::uint8_t>& bytes) {
  return {bytes.begin(), bytes.end()};
}

}  // namespace

struct CalibService::Impl {
  PipelineConfig config;
  std::filesystem::path config_path;
  std::vector<Frame> frames;
  std::vector<CueBundle> bundles;
  std::optional<std::vector<BinaryMask>> truth;

  mutable std::shared_mutex mu;
  Params current;

  httplib::Server server;

  Params snapshot() const {
    std::shared_lock lock(mu);
    return current;
  }

  int frame_index(const std::string& s) const {
    int t = -1;
    try {
      std::size_t used = 0;
      t = std::stoi(s, &used);
      if (used != s.size()) t = -1;
    } catch (const std::exception&) {
      t = -1;
    }
    if (t < 0 || t >= static_cast<int>(frames.size())) {
      throw HttpError(404, "frame '" + s + "' out of range");
    }
    return t;
  }

  FrameProposal propose(int t, const FusionConfig& f, const ProposalParams& p) const {
    return propose_frame(bundles[t], f, p);
  }

  void routes();
};

namespace {

template <typename F>
auto guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const HttpError& e) {
      res.status = e.status;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  };
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw HttpError(400, std::string("malformed JSON: ") + e.what());
  }
}

double query_double(const httplib::Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    return std::stod(req.get_param_value(key));
  } catch (const std::exception&) {
    throw HttpError(422, std::string("query parameter '") + key + "' must be a number");
  }
}

int query_int(const httplib::Request& req, const char* key, int fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    std::size_t used = 0;
    const auto& s = req.get_param_value(key);
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw HttpError(422, std::string("query parameter '") + key + "' must be an integer");
  }
}

}  // namespace

void CalibService::Impl::routes() {
  server.Get("/meta", guarded([this](const httplib::Request&, httplib::Response& res) {
    json roles = json::array();
    for (auto r : kAllRoles) roles.push_back(to_string(r));
    res.set_content(json{{"frames", frames.size()},
                         {"width", frames.front().width()},
                         {"height", frames.front().height()},
                         {"videos", json::array({config.video})},
                         {"roles", roles},
                         {"ground_truth", truth.has_value()}}
                        .dump(),
                    "application/json");
  }));

  server.Get(R"(/frames/(\d+))", guarded([this](const httplib::Request& req,
                                                 httplib::Response& res) {
    const int t = frame_index(req.matches[1]);
    res.set_content(as_string(encode_png_gray(frames[t])), "image/png");
  }));

  server.Get(R"(/cues/([a-z_]+)/(\d+))", guarded([this](const httplib::Request& req,
                                                          httplib::Response& res) {
    CueRole role;
    try {
      role = parse_role(req.matches[1].str());
    } catch (const std::invalid_argument& e) {
      throw HttpError(404, e.what());
    }
    const int t = frame_index(req.matches[2]);
    res.set_content(as_string(encode_png_gray(render_heatmap(bundles[t].get(role)))),
                    "image/png");
  }));

  server.Post("/fuse", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto p = snapshot();
    const json body = parse_body(req);
    if (!body.is_object()) throw HttpError(422, "body must be an object");
    if (!body.contains("frame")) throw HttpError(422, "missing 'frame'");
    int t = -1;
    take(body, {"frame"}, t);
    t = frame_index(std::to_string(t));
    if (auto it = body.find("weights"); it != body.end()) apply_weights(*it, p.fusion.weights);
    take(body, {"tau"}, p.fusion.tau);
    if (auto it = body.find("proposal"); it != body.end()) apply_proposal(*it, p.proposal);
    validate_params(p);

    const auto fp = propose(t, p.fusion, p.proposal);
    const auto png = encode_png_rgb(render_overlay(frames[t], fp.mask, fp.boxes));
    if (req.has_param("format") && req.get_param_value("format") == "png") {
      res.set_header("X-Boxes", boxes_to_json(fp.boxes).dump());
      res.set_content(as_string(png), "image/png");
      return;
    }
    res.set_content(json{{"frame", t},
                         {"mask_area", fp.mask.count()},
                         {"boxes", boxes_to_json(fp.boxes)},
                         {"overlay_png", httplib::detail::base64_encode(as_string(png))}}
                        .dump(),
                    "application/json");
  }));

  server.Get("/score", guarded([this](const httplib::Request& req, httplib::Response& res) {
    if (!truth) throw HttpError(404, "no ground truth loaded");
    auto p = snapshot();
    if (!req.has_param("frame")) throw HttpError(422, "missing 'frame'");
    const int t = frame_index(req.get_param_value("frame"));
    auto& w = p.fusion.weights;
    w.alpha = query_double(req, "alpha", query_double(req, "a", w.alpha));
    w.beta = query_double(req, "beta", query_double(req, "b", w.beta));
    w.gamma = query_double(req, "gamma", query_double(req, "g", w.gamma));
    w.delta = query_double(req, "delta", query_double(req, "d", w.delta));
    p.fusion.tau = query_double(req, "tau", p.fusion.tau);
    p.proposal.min_area = query_int(req, "min_area", p.proposal.min_area);
    p.proposal.margin = query_int(req, "margin", p.proposal.margin);
    p.proposal.connectivity = query_int(req, "connectivity", p.proposal.connectivity);
    validate_params(p);

    const auto fp = propose(t, p.fusion, p.proposal);
    const auto refined =
        fallback_refine(fp.score, fp.boxes, p.tau_box.value_or(p.fusion.tau));
    const auto& gt = (*truth)[t];
    res.set_content(json{{"frame", t},
                         {"proposal",
                          {{"iou", frame_iou(fp.mask, gt)}, {"dice", frame_dice(fp.mask, gt)}}},
                         {"refined",
                          {{"iou", frame_iou(refined, gt)}, {"dice", frame_dice(refined, gt)}}}}
                        .dump(),
                    "application/json");
  }));

  server.Get("/config", guarded([this](const httplib::Request&, httplib::Response& res) {
    res.set_content(params_to_json(snapshot()).dump(), "application/json");
  }));

  server.Put("/config", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    std::unique_lock lock(mu);
    auto next = apply_update(current, body);
    validate_params(next);
    PipelineConfig saved = config;
    saved.fusion = next.fusion;
    saved.proposal = next.proposal;
    saved.temporal = next.temporal;
    saved.refine.tau_box = next.tau_box;
    if (!config_path.empty()) save_config(saved, config_path);
    config = std::move(saved);
    current = next;
    res.set_content(params_to_json(current).dump(), "application/json");
  }));
}

CalibService::CalibService(PipelineConfig cfg, std::filesystem::path config_path,
                           std::optional<std::filesystem::path> dump)
    : impl_(std::make_unique<Impl>()) {
  cfg.validate();
  impl_->config_path = std::move(config_path);
  impl_->frames = load_frame_sequence(cfg.resolve(cfg.frames), cfg.pattern);

  const auto root = dump ? *dump : cfg.resolve(cfg.dump);
  if (root.empty()) throw ConfigError("calibration needs the cue dump directory (output.dump)");
  const DumpLayout layout{root};
  for (auto role : kAllRoles) {
    if (!std::filesystem::exists(layout.cue(role, 0))) {
      throw FormatError("cues missing under " + layout.cues().string() +
                        "; run `turbseg cues` first");
    }
  }
  SequenceContext::Options opts{cfg.flow, cfg.skip, cfg.norm, cfg.vibe, cfg.vibe_warmup, {}};
  const SequenceContext ctx(impl_->frames, dumped_cue_sources(layout.cues()), opts);
  for (int t = 0; t < ctx.length(); ++t) impl_->bundles.push_back(ctx.assemble(t));

  if (!cfg.eval.ground_truth.empty()) {
    std::vector<BinaryMask> gt;
    for (const auto& f : list_frame_files(cfg.resolve(cfg.eval.ground_truth), cfg.eval.pattern)) {
      gt.push_back(read_mask(f, impl_->frames.front().dims()));
    }
    if (gt.size() != impl_->frames.size()) {
      throw FormatError("ground truth has " + std::to_string(gt.size()) + " masks for " +
                        std::to_string(impl_->frames.size()) + " frames");
    }
    impl_->truth = std::move(gt);
  }

  impl_->current = {cfg.fusion, cfg.proposal, cfg.temporal, cfg.refine.tau_box};
  impl_->config = std::move(cfg);
  // Without SO_REUSEPORT, so a second service on the same port fails to bind.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes),
               sizeof(yes));
  });
  impl_->routes();
}

CalibService::~CalibService() { stop(); }

int CalibService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind to " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw std::runtime_error("port " + std::to_string(port) + " on " + host +
                             " is busy or unavailable");
  }
  return port;
}

void CalibService::serve() { impl_->server.listen_after_bind(); }

void CalibService::stop() {
  if (impl_) impl_->server.stop();
}

CalibService::Params CalibService::params() const { return impl_->snapshot(); }

int CalibService::length() const { return static_cast<int>(impl_->frames.size()); }

FrameProposal CalibService::propose(int t, const FusionConfig& fusion,
                                    const ProposalParams& proposal) const {
  if (t < 0 || t >= length()) throw std::out_of_range("frame out of range");
  return impl_->propose(t, fusion, proposal);
}

}  // namespace turbseg
