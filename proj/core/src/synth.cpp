#include "bytetrack/synth.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace bytetrack::synth {

namespace {

// std::*_distribution output is implementation-defined, so the transforms on
// top of the engine are spelled out here to keep corpora portable.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

 private:
  std::mt19937_64 engine_;
};

struct Agent {
  double left, top, width, height, vx, vy;

  BBox box() const { return BBox(left, top, width, height); }
};

void advance(Agent& a, double field_w, double field_h) {
  a.left += a.vx;
  a.top += a.vy;
  if (a.left < 0.0) {
    a.left = -a.left;
    a.vx = -a.vx;
  } else if (a.left + a.width > field_w) {
    a.left = 2.0 * (field_w - a.width) - a.left;
    a.vx = -a.vx;
  }
  if (a.top < 0.0) {
    a.top = -a.top;
    a.vy = -a.vy;
  } else if (a.top + a.height > field_h) {
    a.top = 2.0 * (field_h - a.height) - a.top;
    a.vy = -a.vy;
  }
  a.left = std::clamp(a.left, 0.0, std::max(0.0, field_w - a.width));
  a.top = std::clamp(a.top, 0.0, std::max(0.0, field_h - a.height));
}

constexpr double kMinSide = 2.0;

SyntheticSequence run(const ScenarioConfig& cfg, std::vector<Agent> agents,
                      const std::vector<FixedFalsePositive>& fixed_fps, Random& rng) {
  SyntheticSequence out;
  const std::size_t n = agents.size();
  std::vector<BBox> boxes;
  boxes.reserve(n);

  for (int frame = 1; frame <= cfg.frames; ++frame) {
    if (frame > 1) {
      for (Agent& a : agents) advance(a, cfg.field_width, cfg.field_height);
    }
    boxes.clear();
    for (const Agent& a : agents) boxes.push_back(a.box());

    for (std::size_t i = 0; i < n; ++i) {
      double covered = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        covered = std::max(covered, intersection_area(boxes[i], boxes[j]) / boxes[i].area());
      }
      covered = std::min(covered, 1.0);

      GtEntry g;
      g.frame = frame;
      g.identity = static_cast<int>(i) + 1;
      g.box = boxes[i];
      g.visibility = 1.0 - covered;
      out.gt.push_back(g);

      const double noise = rng.normal() * cfg.score_noise_std;
      const bool missed = rng.uniform() < cfg.miss_prob;
      double jl = rng.normal() * cfg.jitter_std;
      double jt = rng.normal() * cfg.jitter_std;
      double jw = rng.normal() * cfg.jitter_std;
      double jh = rng.normal() * cfg.jitter_std;
      if (missed) continue;

      Detection d;
      d.frame = frame;
      d.score = std::clamp(cfg.base_score - cfg.occlusion_decay * covered + noise, 0.0, 1.0);
      d.box = BBox(boxes[i].left() + jl, boxes[i].top() + jt,
                   std::max(boxes[i].width() + jw, kMinSide),
                   std::max(boxes[i].height() + jh, kMinSide));
      out.dets.push_back(d);
    }

    const int fp_count = rng.poisson(cfg.fp_per_frame);
    for (int k = 0; k < fp_count; ++k) {
      const double h = rng.uniform(cfg.box_height_min, cfg.box_height_max);
      const double w = std::max(h * cfg.aspect, kMinSide);
      const double l = rng.uniform(0.0, std::max(0.0, cfg.field_width - w));
      const double t = rng.uniform(0.0, std::max(0.0, cfg.field_height - h));
      Detection d;
      d.frame = frame;
      d.box = BBox(l, t, w, h);
      d.score = rng.uniform(cfg.fp_score_min, cfg.fp_score_max);
      out.dets.push_back(d);
    }
    for (const FixedFalsePositive& f : fixed_fps) out.dets.push_back({frame, f.box, f.score});
  }
  return out;
}

std::vector<Agent> random_agents(const ScenarioConfig& cfg, Random& rng) {
  std::vector<Agent> agents;
  for (int i = 0; i < cfg.agents; ++i) {
    Agent a{};
    a.height = rng.uniform(cfg.box_height_min, cfg.box_height_max);
    a.width = std::max(a.height * cfg.aspect, kMinSide);
    a.left = rng.uniform(0.0, std::max(0.0, cfg.field_width - a.width));
    a.top = rng.uniform(0.0, std::max(0.0, cfg.field_height - a.height));
    const double speed = rng.uniform(cfg.speed_min, cfg.speed_max);
    const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    a.vx = speed * std::cos(heading);
    a.vy = speed * std::sin(heading);
    agents.push_back(a);
  }
  return agents;
}

using Setter = std::function<void(ScenarioConfig&, std::string_view)>;

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("scenario config: bad number for '" + std::string(key) + "': '" +
                                std::string(v) + "'");
  }
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("scenario config: bad integer for '" + std::string(key) +
                                "': '" + std::string(v) + "'");
  }
  return out;
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto real = [&t](const char* key, double ScenarioConfig::*field) {
      t[key] = [key, field](ScenarioConfig& c, std::string_view v) { c.*field = to_double(key, v); };
    };
    t["seed"] = [](ScenarioConfig& c, std::string_view v) {
      c.seed = to_int<std::uint64_t>("seed", v);
    };
    t["frames"] = [](ScenarioConfig& c, std::string_view v) { c.frames = to_int<int>("frames", v); };
    t["agents"] = [](ScenarioConfig& c, std::string_view v) { c.agents = to_int<int>("agents", v); };
    real("field_width", &ScenarioConfig::field_width);
    real("field_height", &ScenarioConfig::field_height);
    real("speed_min", &ScenarioConfig::speed_min);
    real("speed_max", &ScenarioConfig::speed_max);
    real("box_height_min", &ScenarioConfig::box_height_min);
    real("box_height_max", &ScenarioConfig::box_height_max);
    real("aspect", &ScenarioConfig::aspect);
    real("occlusion_decay", &ScenarioConfig::occlusion_decay);
    real("base_score", &ScenarioConfig::base_score);
    real("score_noise_std", &ScenarioConfig::score_noise_std);
    real("miss_prob", &ScenarioConfig::miss_prob);
    real("fp_per_frame", &ScenarioConfig::fp_per_frame);
    real("fp_score_min", &ScenarioConfig::fp_score_min);
    real("fp_score_max", &ScenarioConfig::fp_score_max);
    real("jitter_std", &ScenarioConfig::jitter_std);
    return t;
  }();
  return table;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("scenario config: " + m); };
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (frames < 0) fail("frames must be >= 0");
  if (agents < 0) fail("agents must be >= 0");
  if (!(field_width > 0.0) || !(field_height > 0.0)) fail("field size must be positive");
  if (!(speed_min >= 0.0) || speed_min > speed_max) fail("speed range is empty or negative");
  if (!(box_height_min >= kMinSide) || box_height_min > box_height_max) {
    fail("box height range must be non-empty and >= 2 px");
  }
  if (!(aspect > 0.0)) fail("aspect must be positive");
  if (box_height_max > field_height || box_height_max * aspect > field_width) {
    fail("boxes must fit inside the field");
  }
  if (!(occlusion_decay >= 0.0)) fail("occlusion_decay must be >= 0");
  if (!unit(base_score)) fail("base_score must lie in [0, 1]");
  if (!(score_noise_std >= 0.0)) fail("score_noise_std must be >= 0");
  if (!unit(miss_prob)) fail("miss_prob must lie in [0, 1]");
  if (!(fp_per_frame >= 0.0) || fp_per_frame > 100.0) fail("fp_per_frame must lie in [0, 100]");
  if (!unit(fp_score_min) || !unit(fp_score_max) || fp_score_min > fp_score_max) {
    fail("fp score range must be a non-empty subset of [0, 1]");
  }
  if (!(jitter_std >= 0.0)) fail("jitter_std must be >= 0");
}

SyntheticSequence generate(const ScenarioConfig& cfg) {
  cfg.validate();
  Random rng(cfg.seed);
  std::vector<Agent> agents = random_agents(cfg, rng);
  return run(cfg, std::move(agents), {}, rng);
}

SyntheticSequence generate(const Scenario& scenario) {
  const ScenarioConfig& cfg = scenario.config;
  cfg.validate();
  Random rng(cfg.seed);
  std::vector<Agent> agents;
  if (scenario.scripted.empty()) {
    agents = random_agents(cfg, rng);
  } else {
    for (const ScriptedAgent& s : scenario.scripted) {
      agents.push_back({s.start.left(), s.start.top(), s.start.width(), s.start.height(), s.vx,
                        s.vy});
    }
  }
  return run(cfg, std::move(agents), scenario.fixed_false_positives, rng);
}

Scenario crossing_preset() {
  Scenario s;
  s.name = "crossing";
  ScenarioConfig& c = s.config;
  c.seed = 20211014;
  c.frames = 60;
  c.field_width = 1280.0;
  c.field_height = 720.0;
  c.agents = 3;
  c.box_height_min = 87.0;
  c.box_height_max = 120.0;
  c.occlusion_decay = 0.8;
  c.base_score = 0.8;
  c.score_noise_std = 0.0;
  c.miss_prob = 0.0;
  c.fp_per_frame = 0.0;
  c.jitter_std = 0.0;

  // Agent 1 (front) is 87 px tall and top-aligned with agent 2 (100 px), so
  // full horizontal overlap covers 87% of agent 2. Both are 35 px wide and
  // agent 1 gains 5 px of overlap per frame: coverage steps by 0.87/7.
  s.scripted = {
      {BBox(445.0, 300.0, 35.0, 87.0), 5.0, 0.0},
      {BBox(600.0, 300.0, 35.0, 100.0), 0.0, 0.0},
      {BBox(200.0, 500.0, 48.0, 120.0), 2.0, -1.0},
  };
  s.fixed_false_positives = {{BBox(1000.0, 100.0, 40.0, 100.0), 0.35}};
  // Coverage 0, 4/7 and 7/7 of the maximum: scores 0.80, 0.40, 0.10.
  s.key_frames = {25, 29, 32};
  s.focus_identity = 2;
  return s;
}

Scenario dense_preset() {
  Scenario s;
  s.name = "dense";
  ScenarioConfig& c = s.config;
  c.seed = 4;
  c.frames = 1000;
  c.field_width = 3840.0;
  c.field_height = 2160.0;
  c.agents = 100;
  c.speed_min = 1.0;
  c.speed_max = 4.0;
  c.box_height_min = 40.0;
  c.box_height_max = 120.0;
  c.occlusion_decay = 0.0;
  c.base_score = 0.9;
  c.score_noise_std = 0.0;
  c.miss_prob = 0.0;
  c.fp_per_frame = 0.0;
  c.jitter_std = 0.5;
  return s;
}

Scenario preset(const std::string& name) {
  if (name == "crossing") return crossing_preset();
  if (name == "dense") return dense_preset();
  throw std::invalid_argument("unknown scenario preset '" + name + "'");
}

std::string to_key_value(const ScenarioConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "prng=" << kPrngId << '\n'
     << "seed=" << c.seed << '\n'
     << "frames=" << c.frames << '\n'
     << "field_width=" << c.field_width << '\n'
     << "field_height=" << c.field_height << '\n'
     << "agents=" << c.agents << '\n'
     << "speed_min=" << c.speed_min << '\n'
     << "speed_max=" << c.speed_max << '\n'
     << "box_height_min=" << c.box_height_min << '\n'
     << "box_height_max=" << c.box_height_max << '\n'
     << "aspect=" << c.aspect << '\n'
     << "occlusion_decay=" << c.occlusion_decay << '\n'
     << "base_score=" << c.base_score << '\n'
     << "score_noise_std=" << c.score_noise_std << '\n'
     << "miss_prob=" << c.miss_prob << '\n'
     << "fp_per_frame=" << c.fp_per_frame << '\n'
     << "fp_score_min=" << c.fp_score_min << '\n'
     << "fp_score_max=" << c.fp_score_max << '\n'
     << "jitter_std=" << c.jitter_std << '\n';
  return os.str();
}

ScenarioConfig parse_key_value(std::istream& in) {
  ScenarioConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view v(raw);
    if (const std::size_t hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const std::size_t eq = v.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("scenario config line " + std::to_string(line) +
                                  ": expected key=value");
    }
    const std::string_view key = trim(v.substr(0, eq));
    const std::string_view value = trim(v.substr(eq + 1));
    if (key == "prng") {
      if (value != kPrngId) {
        throw std::invalid_argument("scenario config: unsupported prng '" + std::string(value) +
                                    "'");
      }
      continue;
    }
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) {
      throw std::invalid_argument("scenario config line " + std::to_string(line) +
                                  ": unknown key '" + std::string(key) + "'");
    }
    it->second(cfg, value);
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario config '" + path + "'");
  return parse_key_value(in);
}

}  // namespace bytetrack::synth
