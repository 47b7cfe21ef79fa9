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

#include <cctype>
#include <charconv>
#include <utility>
#include <set>

#include "turbseg/frameio.hpp"

namespace turbseg {

// ---------------------------------------------------------------- toml subset

namespace toml {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

bool bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string parse_key(std::string_view raw, int line) {
  std::string key;
  std::size_t start = 0;
  while (true) {
    auto dot = raw.find('.', start);
    auto part = trim(raw.substr(start, dot == std::string_view::npos ? raw.npos : dot - start));
    if (part.empty()) fail(line, "empty key segment");
    for (char c : part) {
      if (!bare_key_char(c)) fail(line, "unsupported key '" + std::string(raw) + "'");
    }
    if (!key.empty()) key += '.';
    key += part;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return key;
}

void expect_line_end(std::string_view rest, int line) {
  rest = trim(rest);
  if (!rest.empty() && rest.front() != '#') {
    fail(line, "unexpected trailing text '" + std::string(rest) + "'");
  }
}

Value parse_value(std::string_view s, int line) {
  s = trim(s);
  if (s.empty()) fail(line, "missing value");
  if (s.front() == '"') {
    std::string out;
    std::size_t i = 1;
    for (; i < s.size() && s[i] != '"'; ++i) {
      if (s[i] != '\\') {
        out += s[i];
        continue;
      }
      if (++i >= s.size()) fail(line, "unterminated escape");
      switch (s[i]) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: fail(line, std::string("unsupported escape \\") + s[i]);
      }
    }
    if (i >= s.size()) fail(line, "unterminated string");
    expect_line_end(s.substr(i + 1), line);
    return out;
  }
  if (s.front() == '\'') {
    auto end = s.find('\'', 1);
    if (end == std::string_view::npos) fail(line, "unterminated string");
    expect_line_end(s.substr(end + 1), line);
    return std::string(s.substr(1, end - 1));
  }
  if (s.front() == '[' || s.front() == '{') {
    fail(line, "arrays and inline tables are not supported");
  }
  auto end = s.find_first_of(" \t#");
  auto tok = s.substr(0, end);
  expect_line_end(end == std::string_view::npos ? std::string_view{} : s.substr(end), line);
  if (tok == "true") return true;
  if (tok == "false") return false;

  std::string digits;
  for (std::size_t i = 0; i < tok.size(); ++i) {
    if (tok[i] == '_') {
      if (i == 0 || i + 1 == tok.size() || !std::isdigit(static_cast<unsigned char>(tok[i - 1])) ||
          !std::isdigit(static_cast<unsigned char>(tok[i + 1]))) {
        fail(line, "misplaced '_' in number");
      }
      continue;
    }
    digits += tok[i];
  }
  const char* first = digits.data() + (digits.size() > 0 && digits[0] == '+' ? 1 : 0);
  const char* last = digits.data() + digits.size();
  if (digits.find_first_of(".eE") == std::string::npos) {
    long long v = 0;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec == std::errc() && p == last) return v;
  } else {
    double v = 0;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec == std::errc() && p == last) return v;
  }
  fail(line, "cannot parse value '" + std::string(tok) + "'");
}

}  // namespace

Document parse(std::string_view text) {
  Document doc;
  std::string prefix;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.size() > 1 && line[1] == '[') fail(line_no, "arrays of tables are not supported");
      auto close = line.find(']');
      if (close == std::string_view::npos) fail(line_no, "unterminated table header");
      prefix = parse_key(line.substr(1, close - 1), line_no) + ".";
      expect_line_end(line.substr(close + 1), line_no);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    auto key = prefix + parse_key(line.substr(0, eq), line_no);
    auto value = parse_value(line.substr(eq + 1), line_no);
    if (!doc.emplace(key, std::move(value)).second) {
      fail(line_no, "duplicate key '" + key + "'");
    }
  }
  return doc;
}

std::string format_value(const Value& v) {
  if (auto b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (auto i = std::get_if<long long>(&v)) return std::to_string(*i);
  if (auto d = std::get_if<double>(&v)) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    std::string s(buf, p);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  }
  std::string out = "\"";
  for (char c : std::get<std::string>(v)) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

}  // namespace toml

// ---------------------------------------------------------------- config

std::string_view to_string(RefineMode m) {
  return m == RefineMode::fallback ? "fallback" : "external";
}

RefineMode parse_refine_mode(std::string_view s) {
  if (s == "fallback") return RefineMode::fallback;
  if (s == "external") return RefineMode::external;
  throw ConfigError("unknown refine mode '" + std::string(s) + "'");
}

PipelineConfig::PipelineConfig() {
  cues[CueRole::motion] = {CueRole::motion, CueOrigin::builtin, {}, std::nullopt, false};
  cues[CueRole::skip_motion] = {CueRole::skip_motion, CueOrigin::builtin, {}, std::nullopt, false};
  cues[CueRole::semantic] = {CueRole::semantic, CueOrigin::files, {}, std::nullopt, true};
  cues[CueRole::background] = {CueRole::background, CueOrigin::builtin, {}, std::nullopt, false};
}

std::filesystem::path PipelineConfig::resolve(const std::filesystem::path& p) const {
  if (p.empty() || p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::vector<CueSource> PipelineConfig::cue_sources() const {
  std::vector<CueSource> out;
  for (const auto& [role, src] : cues) {
    CueSource s = src;
    s.directory = resolve(s.directory);
    out.push_back(std::move(s));
  }
  return out;
}

void PipelineConfig::validate() const {
  try {
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (vibe_warmup < 0) throw std::invalid_argument("vibe.warmup must be >= 0");
    for (auto role : kAllRoles) {
      if (!cues.count(role)) {
        throw std::invalid_argument("no cue source for " + std::string(to_string(role)));
      }
      cues.at(role).validate();
    }
    flow.validate();
    skip.validate();
    norm.validate();
    vibe.validate();
    fusion.validate();
    proposal.validate();
    temporal.validate();
    if (refine.tau_box && !(*refine.tau_box > 0.0 && *refine.tau_box <= 1.0)) {
      throw std::invalid_argument("refine.tau_box must lie in (0, 1]");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

namespace {

class Reader {
 public:
  explicit Reader(toml::Document doc) : doc_(std::move(doc)) {}

  template <typename T>
  void get(const std::string& key, T& out) {
    auto it = doc_.find(key);
    if (it == doc_.end()) return;
    used_.insert(key);
    const auto& v = it->second;
    if constexpr (std::is_same_v<T, bool>) {
      if (!std::holds_alternative<bool>(v)) wrong(key, "a boolean");
      out = std::get<bool>(v);
    } else if constexpr (std::is_integral_v<T>) {
      if (!std::holds_alternative<long long>(v)) wrong(key, "an integer");
      const auto i = std::get<long long>(v);
      if (!std::in_range<T>(i)) wrong(key, "an integer in range");
      out = static_cast<T>(i);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (auto i = std::get_if<long long>(&v)) out = static_cast<T>(*i);
      else if (auto d = std::get_if<double>(&v)) out = static_cast<T>(*d);
      else wrong(key, "a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!std::holds_alternative<std::string>(v)) wrong(key, "a string");
      out = std::get<std::string>(v);
    } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
      if (!std::holds_alternative<std::string>(v)) wrong(key, "a path string");
      out = std::get<std::string>(v);
    } else {
      static_assert(sizeof(T) == 0, "unsupported config type");
    }
  }

  bool has(const std::string& key) const { return doc_.count(key) != 0; }

  void reject_unknown() const {
    for (const auto& [k, v] : doc_) {
      if (!used_.count(k)) throw ConfigError("unknown config key '" + k + "'");
    }
  }

 private:
  [[noreturn]] void wrong(const std::string& key, const char* what) {
    throw ConfigError("config key '" + key + "' must be " + what);
  }

  toml::Document doc_;
  std::set<std::string> used_;
};

}  // namespace

PipelineConfig parse_config(std::string_view text,
                            const std::filesystem::path& base_dir) {
  Reader r(toml::parse(text));
  PipelineConfig c;
  c.base_dir = base_dir;

  r.get("seed", c.seed);
  r.get("threads", c.threads);
  r.get("input.frames", c.frames);
  r.get("input.pattern", c.pattern);
  r.get("input.video", c.video);
  r.get("output.masks", c.masks);
  r.get("output.report", c.report);
  r.get("output.dump", c.dump);

  r.get("cues.root", c.cue_root);
  for (auto role : kAllRoles) {
    const std::string prefix = "cues." + std::string(to_string(role)) + ".";
    auto& src = c.cues[role];
    std::string origin(to_string(src.origin));
    r.get(prefix + "origin", origin);
    try {
      src.origin = parse_origin(origin);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    r.get(prefix + "dir", src.directory);
    r.get(prefix + "optional", src.optional);
    bool normalize = false;
    r.get(prefix + "normalize", normalize);
    NormConfig n;
    r.get(prefix + "percentile", n.percentile);
    if (normalize) src.normalization = n;
  }

  r.get("flow.pyramid_levels", c.flow.pyramid_levels);
  r.get("flow.block", c.flow.block);
  r.get("flow.search_radius", c.flow.search_radius);
  r.get("skip.k", c.skip.k);
  r.get("norm.percentile", c.norm.percentile);
  r.get("vibe.samples", c.vibe.samples_n);
  r.get("vibe.radius", c.vibe.radius_r);
  r.get("vibe.min_matches", c.vibe.min_matches);
  r.get("vibe.subsample", c.vibe.subsample_phi);
  r.get("vibe.warmup", c.vibe_warmup);
  r.get("fusion.alpha", c.fusion.weights.alpha);
  r.get("fusion.beta", c.fusion.weights.beta);
  r.get("fusion.gamma", c.fusion.weights.gamma);
  r.get("fusion.delta", c.fusion.weights.delta);
  r.get("fusion.tau", c.fusion.tau);
  r.get("fusion.semantic_pregate", c.fusion.semantic_pregate);
  r.get("fusion.pregate_epsilon", c.fusion.pregate_epsilon);
  r.get("proposal.min_area", c.proposal.min_area);
  r.get("proposal.margin", c.proposal.margin);
  r.get("proposal.connectivity", c.proposal.connectivity);
  r.get("temporal.iou_min", c.temporal.iou_min);
  r.get("temporal.gap_max", c.temporal.gap_max);
  r.get("temporal.tail_propagate", c.temporal.tail_propagate);

  std::string mode(to_string(c.refine.mode));
  r.get("refine.mode", mode);
  c.refine.mode = parse_refine_mode(mode);
  if (r.has("refine.tau_box")) {
    double tb = 0;
    r.get("refine.tau_box", tb);
    c.refine.tau_box = tb;
  }
  r.get("refine.prompts", c.refine.prompts);
  r.get("refine.refined_dir", c.refine.refined_dir);
  r.get("refine.command", c.refine.command);
  r.get("refine.fallback_on_missing", c.refine.fallback_on_missing);

  r.get("eval.ground_truth", c.eval.ground_truth);
  r.get("eval.pattern", c.eval.pattern);
  std::string policy(to_string(c.eval.empty_policy));
  r.get("eval.empty_policy", policy);
  try {
    c.eval.empty_policy = parse_empty_policy(policy);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  r.reject_unknown();
  c.vibe.rng_seed = c.seed;
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_bytes(path);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  auto base = std::filesystem::absolute(path).parent_path();
  return parse_config(std::string(bytes.begin(), bytes.end()), base);
}

std::string to_toml(const PipelineConfig& c) {
  std::string out;
  auto kv = [&](const std::string& key, const toml::Value& v) {
    out += key + " = " + toml::format_value(v) + "\n";
  };
  auto section = [&](const std::string& name) { out += "\n[" + name + "]\n"; };
  auto integer = [](auto v) { return toml::Value(static_cast<long long>(v)); };

  kv("seed", integer(c.seed));
  kv("threads", integer(c.threads));

  section("input");
  kv("frames", c.frames.string());
  kv("pattern", c.pattern);
  kv("video", c.video);

  section("output");
  kv("masks", c.masks.string());
  kv("report", c.report.string());
  kv("dump", c.dump.string());

  section("cues");
  kv("root", c.cue_root.string());
  for (auto role : kAllRoles) {
    const auto& src = c.cues.at(role);
    section("cues." + std::string(to_string(role)));
    kv("origin", std::string(to_string(src.origin)));
    kv("dir", src.directory.string());
    kv("optional", src.optional);
    kv("normalize", src.normalization.has_value());
    kv("percentile", src.normalization.value_or(NormConfig{}).percentile);
  }

  section("flow");
  kv("pyramid_levels", integer(c.flow.pyramid_levels));
  kv("block", integer(c.flow.block));
  kv("search_radius", integer(c.flow.search_radius));
  section("skip");
  kv("k", integer(c.skip.k));
  section("norm");
  kv("percentile", c.norm.percentile);
  section("vibe");
  kv("samples", integer(c.vibe.samples_n));
  kv("radius", integer(c.vibe.radius_r));
  kv("min_matches", integer(c.vibe.min_matches));
  kv("subsample", integer(c.vibe.subsample_phi));
  kv("warmup", integer(c.vibe_warmup));

  section("fusion");
  kv("alpha", c.fusion.weights.alpha);
  kv("beta", c.fusion.weights.beta);
  kv("gamma", c.fusion.weights.gamma);
  kv("delta", c.fusion.weights.delta);
  kv("tau", c.fusion.tau);
  kv("semantic_pregate", c.fusion.semantic_pregate);
  kv("pregate_epsilon", c.fusion.pregate_epsilon);

  section("proposal");
  kv("min_area", integer(c.proposal.min_area));
  kv("margin", integer(c.proposal.margin));
  kv("connectivity", integer(c.proposal.connectivity));

  section("temporal");
  kv("iou_min", c.temporal.iou_min);
  kv("gap_max", integer(c.temporal.gap_max));
  kv("tail_propagate", c.temporal.tail_propagate);

  section("refine");
  kv("mode", std::string(to_string(c.refine.mode)));
  if (c.refine.tau_box) kv("tau_box", *c.refine.tau_box);
  kv("prompts", c.refine.prompts.string());
  kv("refined_dir", c.refine.refined_dir.string());
  kv("command", c.refine.command);
  kv("fallback_on_missing", c.refine.fallback_on_missing);

  section("eval");
  kv("ground_truth", c.eval.ground_truth.string());
  kv("pattern", c.eval.pattern);
  kv("empty_policy", std::string(to_string(c.eval.empty_policy)));
  return out;
}

void save_config(const PipelineConfig& cfg, const std::filesystem::path& path) {
  const auto text = to_toml(cfg);
  const auto tmp = path.string() + ".tmp";
  write_bytes({text.begin(), text.end()}, tmp);
  std::filesystem::rename(tmp, path);
}

}  // namespace turbseg
