#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "bytetrack/synth.hpp"

using namespace bytetrack;
using namespace bytetrack::synth;

namespace {

ScenarioConfig noiseless() {
  ScenarioConfig c;
  c.seed = 77;
  c.frames = 40;
  c.agents = 8;
  c.occlusion_decay = 0.0;
  c.score_noise_std = 0.0;
  c.miss_prob = 0.0;
  c.fp_per_frame = 0.0;
  c.jitter_std = 0.0;
  return c;
}

double score_of(const SyntheticSequence& s, int frame, const BBox& near) {
  for (const Detection& d : s.dets) {
    if (d.frame == frame && iou(d.box, near) > 0.99) return d.score;
  }
  return -1.0;
}

}  // namespace

TEST(Generate, NoiselessDetectionsEqualGroundTruth) {
  const ScenarioConfig c = noiseless();
  const SyntheticSequence s = generate(c);
  ASSERT_EQ(s.gt.size(), static_cast<std::size_t>(c.frames * c.agents));
  ASSERT_EQ(s.dets.size(), s.gt.size());
  for (std::size_t i = 0; i < s.gt.size(); ++i) {
    EXPECT_EQ(s.dets[i].frame, s.gt[i].frame);
    EXPECT_EQ(s.dets[i].box, s.gt[i].box);
    EXPECT_DOUBLE_EQ(s.dets[i].score, c.base_score);
  }
}

TEST(Generate, SameSeedSameOutput) {
  ScenarioConfig c;
  c.seed = 5;
  c.frames = 50;
  c.miss_prob = 0.1;
  const SyntheticSequence a = generate(c);
  const SyntheticSequence b = generate(c);
  ASSERT_EQ(a.dets.size(), b.dets.size());
  for (std::size_t i = 0; i < a.dets.size(); ++i) {
    ASSERT_EQ(a.dets[i].box, b.dets[i].box);
    ASSERT_EQ(a.dets[i].score, b.dets[i].score);
  }
  c.seed = 6;
  const SyntheticSequence other = generate(c);
  EXPECT_FALSE(other.dets.size() == a.dets.size() && other.dets[0].box == a.dets[0].box);
}

TEST(Generate, FullOverlapScore) {
  Scenario s;
  s.config = noiseless();
  s.config.frames = 3;
  s.config.occlusion_decay = 0.5;
  s.config.base_score = 0.9;
  s.scripted = {{BBox(100, 100, 40, 100), 0, 0}, {BBox(100, 100, 40, 100), 0, 0}};
  const SyntheticSequence out = generate(s);
  ASSERT_EQ(out.dets.size(), 6u);
  EXPECT_DOUBLE_EQ(out.dets[0].score, 0.9);  // front agent
  EXPECT_NEAR(out.dets[1].score, 0.4, 1e-12);
  EXPECT_NEAR(out.gt[1].visibility, 0.0, 1e-12);
}

TEST(Generate, ScoreNeverRisesWithOverlap) {
  Scenario s;
  s.config = noiseless();
  s.config.frames = 12;
  s.config.occlusion_decay = 0.8;
  s.scripted = {{BBox(100, 100, 40, 100), 4, 0}, {BBox(150, 100, 40, 100), 0, 0}};
  const SyntheticSequence out = generate(s);
  double prev_overlap = -1.0, prev_score = 2.0;
  for (int f = 1; f <= 12; ++f) {
    const BBox front = out.gt[2 * (f - 1)].box;
    const BBox back = out.gt[2 * (f - 1) + 1].box;
    const double overlap = intersection_area(front, back) / back.area();
    const double score = out.dets[2 * (f - 1) + 1].score;
    ASSERT_GE(overlap, prev_overlap);
    ASSERT_LE(score, prev_score);
    prev_overlap = overlap;
    prev_score = score;
  }
  EXPECT_LT(prev_score, 0.8);
}

TEST(Generate, BoxesStayAboveMinimumSize) {
  ScenarioConfig c;
  c.seed = 9;
  c.frames = 100;
  c.box_height_min = 2.0;
  c.box_height_max = 6.0;
  c.jitter_std = 5.0;
  c.fp_per_frame = 3.0;
  const SyntheticSequence s = generate(c);
  for (const GtEntry& g : s.gt) {
    ASSERT_GE(g.box.width(), 2.0 - 1e-12);
    ASSERT_GE(g.box.height(), 2.0 - 1e-12);
  }
  for (const Detection& d : s.dets) {
    ASSERT_GE(d.box.width(), 2.0);
    ASSERT_GE(d.box.height(), 2.0);
    ASSERT_GE(d.score, 0.0);
    ASSERT_LE(d.score, 1.0);
  }
}

TEST(Generate, AgentsStayInsideTheField) {
  ScenarioConfig c;
  c.seed = 12;
  c.frames = 400;
  c.field_width = 300;
  c.field_height = 200;
  c.box_height_max = 100;
  c.speed_max = 9;
  for (const GtEntry& g : generate(c).gt) {
    ASSERT_GE(g.box.left(), 0.0);
    ASSERT_GE(g.box.top(), 0.0);
    ASSERT_LE(g.box.right(), 300.0 + 1e-9);
    ASSERT_LE(g.box.bottom(), 200.0 + 1e-9);
  }
}

TEST(Generate, FalsePositiveRateMatchesPoissonMean) {
  ScenarioConfig c;
  c.seed = 31;
  c.frames = 10000;
  c.agents = 0;
  c.fp_per_frame = 2.5;
  const SyntheticSequence s = generate(c);
  const double mean = static_cast<double>(s.dets.size()) / c.frames;
  const double sigma = std::sqrt(c.fp_per_frame / c.frames);
  EXPECT_LE(std::abs(mean - c.fp_per_frame), 3.0 * sigma);
  for (const Detection& d : s.dets) {
    ASSERT_GE(d.score, c.fp_score_min);
    ASSERT_LE(d.score, c.fp_score_max);
  }
}

TEST(Generate, MissProbabilityDropsDetections) {
  ScenarioConfig c = noiseless();
  c.frames = 500;
  c.miss_prob = 0.3;
  const SyntheticSequence s = generate(c);
  const double kept = static_cast<double>(s.dets.size()) / static_cast<double>(s.gt.size());
  EXPECT_NEAR(kept, 0.7, 0.03);
}

TEST(CrossingPreset, KeyFrameScores) {
  const Scenario s = crossing_preset();
  const SyntheticSequence out = generate(s);
  ASSERT_EQ(s.key_frames.size(), 3u);
  const double expected[] = {0.8, 0.4, 0.1};
  for (int k = 0; k < 3; ++k) {
    const int f = s.key_frames[k];
    double score = -1.0;
    for (std::size_t i = 0; i < out.gt.size(); ++i) {
      if (out.gt[i].frame == f && out.gt[i].identity == s.focus_identity) {
        score = score_of(out, f, out.gt[i].box);
      }
    }
    EXPECT_NEAR(score, expected[k], 0.05) << "frame " << f;
  }
}

TEST(CrossingPreset, ThreeIdentitiesAndIsolatedBackgroundBox) {
  const SyntheticSequence out = generate(crossing_preset());
  std::set<int> ids;
  for (const GtEntry& g : out.gt) ids.insert(g.identity);
  EXPECT_EQ(ids.size(), 3u);
  int background = 0;
  for (const Detection& d : out.dets) {
    if (d.score != 0.35) continue;
    ++background;
    for (const GtEntry& g : out.gt) ASSERT_EQ(iou(d.box, g.box), 0.0);
  }
  EXPECT_EQ(background, 60);
}

TEST(Presets, LookupByName) {
  EXPECT_EQ(preset("crossing").name, "crossing");
  EXPECT_EQ(preset("dense").config.agents, 100);
  EXPECT_THROW(preset("nope"), std::invalid_argument);
}

TEST(ConfigText, RoundTrip) {
  ScenarioConfig c;
  c.seed = 123456789012345ULL;
  c.frames = 77;
  c.occlusion_decay = 0.65;
  c.fp_score_max = 0.45;
  c.jitter_std = 1.0 / 3.0;
  std::istringstream in(to_key_value(c));
  const ScenarioConfig back = parse_key_value(in);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.frames, 77);
  EXPECT_EQ(back.jitter_std, c.jitter_std);
  EXPECT_EQ(to_key_value(back), to_key_value(c));
}

TEST(ConfigText, RejectsBadInput) {
  std::istringstream wrong_prng("prng=minstd/v0\n");
  EXPECT_THROW(parse_key_value(wrong_prng), std::invalid_argument);
  std::istringstream unknown("speed=3\n");
  EXPECT_THROW(parse_key_value(unknown), std::invalid_argument);
  std::istringstream bad_value("frames=ten\n");
  EXPECT_THROW(parse_key_value(bad_value), std::invalid_argument);
  std::istringstream bad_range("base_score=1.5\n");
  EXPECT_THROW(parse_key_value(bad_range), std::invalid_argument);
  std::istringstream ok("# comment\n\nseed = 4  # trailing\n");
  EXPECT_EQ(parse_key_value(ok).seed, 4u);
}
