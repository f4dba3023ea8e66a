#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bytetrack/geometry.hpp"
#include "bytetrack/metrics.hpp"

namespace bytetrack::synth {

/// Identifier of the random stream layout (engine and transforms). Written to
/// every config snapshot; a snapshot with a different identifier is refused.
inline constexpr const char* kPrngId = "mt19937_64+boxmuller+knuth-poisson/v1";

struct ScenarioConfig {
  std::uint64_t seed = 1;
  int frames = 300;
  double field_width = 1920.0;
  double field_height = 1080.0;
  int agents = 20;
  double speed_min = 1.0;  // pixels per frame
  double speed_max = 4.0;
  double box_height_min = 60.0;
  double box_height_max = 160.0;
  double aspect = 0.4;  // width / height
  // Score penalty per unit of fractional overlap by agents in front.
  double occlusion_decay = 0.8;
  double base_score = 0.9;
  double score_noise_std = 0.05;
  double miss_prob = 0.0;
  double fp_per_frame = 1.0;
  double fp_score_min = 0.1;
  double fp_score_max = 0.5;
  double jitter_std = 1.0;

  /// Throws std::invalid_argument on empty or out-of-range parameters.
  void validate() const;
};

/// Fixed trajectory used instead of a random draw for one agent.
struct ScriptedAgent {
  BBox start;
  double vx = 0.0;
  double vy = 0.0;
};

/// Background box emitted unchanged in every frame.
struct FixedFalsePositive {
  BBox box;
  double score = 0.0;
};

struct Scenario {
  std::string name;
  ScenarioConfig config;
  // When non-empty, replaces the random agents (config.agents is ignored).
  std::vector<ScriptedAgent> scripted;
  std::vector<FixedFalsePositive> fixed_false_positives;
  // Frames of interest and the agent (gt identity) they describe.
  std::vector<int> key_frames;
  int focus_identity = 0;
};

struct SyntheticSequence {
  std::vector<GtEntry> gt;
  std::vector<Detection> dets;
};

/// Agents move at constant velocity and bounce off the field borders. Agent i
/// is drawn in front of every agent j > i. An agent's detection score is
/// clamp(base_score - occlusion_decay * o + noise, 0, 1) where o is the
/// largest fraction of its box covered by a single agent in front of it.
/// Deterministic for a given config.
SyntheticSequence generate(const ScenarioConfig& cfg);
SyntheticSequence generate(const Scenario& scenario);

/// Three agents: one walks across a stationary one so the covered agent's
/// score drops roughly 0.8 -> 0.4 -> 0.1 over the key frames, plus one
/// persistent background box at score 0.35 away from every agent.
Scenario crossing_preset();

/// 100 agents over 1000 frames with clean scores; used for timing.
Scenario dense_preset();

/// Looks up "crossing" or "dense"; throws std::invalid_argument otherwise.
Scenario preset(const std::string& name);

/// Plain `key=value` lines, including `prng=<kPrngId>`.
std::string to_key_value(const ScenarioConfig& cfg);
/// Reads `key=value` lines ('#' starts a comment). Unknown keys, bad values
/// and a mismatching `prng` are errors (std::invalid_argument). Missing keys
/// keep their defaults.
ScenarioConfig parse_key_value(std::istream& in);
ScenarioConfig read_config(const std::string& path);

}  // namespace bytetrack::synth
