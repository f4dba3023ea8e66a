#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "bytetrack/postprocess.hpp"
#include "oracles.hpp"

using namespace bytetrack;

namespace {

TrackEntry entry_tlbr(int frame, double x1, double y1, double x2, double y2, double score = 0.9) {
  return TrackEntry{frame, BBox::from_tlbr(x1, y1, x2, y2), score, false};
}

const TrackEntry* at_frame(const TrackDump& d, int id, int frame) {
  for (const TrackEntry& e : d.tracks().at(id)) {
    if (e.frame == frame) return &e;
  }
  return nullptr;
}

TrackDump random_dump(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ids(1, 4);
  std::uniform_int_distribution<int> step(1, 30);
  std::uniform_real_distribution<double> coord(-100, 500);
  std::uniform_real_distribution<double> size(5, 150);
  std::uniform_real_distribution<double> score(0, 1);
  TrackDump d;
  const int n_ids = ids(rng);
  for (int id = 1; id <= n_ids; ++id) {
    int frame = step(rng);
    for (int k = 0; k < 8; ++k) {
      d.add(id, TrackEntry{frame, BBox(coord(rng), coord(rng), size(rng), size(rng)), score(rng),
                           false});
      frame += step(rng);
    }
  }
  return d;
}

}  // namespace

TEST(Interpolate, MidpointOfGap) {
  TrackDump d;
  d.add(1, entry_tlbr(10, 0, 0, 10, 10));
  d.add(1, entry_tlbr(20, 20, 0, 30, 10));
  const TrackDump out = interpolate(d, {20});
  const TrackEntry* mid = at_frame(out, 1, 15);
  ASSERT_NE(mid, nullptr);
  const auto b = mid->box.tlbr();
  EXPECT_NEAR(b[0], 10, 1e-12);
  EXPECT_NEAR(b[1], 0, 1e-12);
  EXPECT_NEAR(b[2], 20, 1e-12);
  EXPECT_NEAR(b[3], 10, 1e-12);
  EXPECT_TRUE(mid->interpolated);
  EXPECT_EQ(out.tracks().at(1).size(), 11u);
}

TEST(Interpolate, QuarterPoint) {
  TrackDump d;
  d.add(1, entry_tlbr(0, 0, 0, 4, 4));
  d.add(1, entry_tlbr(4, 4, 4, 8, 8));
  const auto b = at_frame(interpolate(d, {20}), 1, 1)->box.tlbr();
  EXPECT_NEAR(b[0], 1, 1e-12);
  EXPECT_NEAR(b[1], 1, 1e-12);
  EXPECT_NEAR(b[2], 5, 1e-12);
  EXPECT_NEAR(b[3], 5, 1e-12);
}

TEST(Interpolate, GapAboveSigmaIsLeftAlone) {
  TrackDump d;
  d.add(1, entry_tlbr(1, 0, 0, 10, 10));
  d.add(1, entry_tlbr(22, 0, 0, 10, 10));
  EXPECT_EQ(interpolate(d, {20}).box_count(), 2u);
  EXPECT_EQ(interpolate(d, {21}).box_count(), 22u);
}

TEST(Interpolate, SigmaZeroIsIdentity) {
  std::mt19937_64 rng(2);
  const TrackDump d = random_dump(rng);
  EXPECT_EQ(interpolate(d, {0}), d);
  EXPECT_THROW(interpolate(d, {-1}), std::invalid_argument);
}

TEST(Interpolate, ScoreIsInterpolatedToo) {
  TrackDump d;
  d.add(1, entry_tlbr(1, 0, 0, 10, 10, 0.2));
  d.add(1, entry_tlbr(3, 0, 0, 10, 10, 0.6));
  EXPECT_NEAR(at_frame(interpolate(d, {20}), 1, 2)->score, 0.4, 1e-12);
}

TEST(Interpolate, MatchesPerCoordinateOracle) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> start(1, 500);
  std::uniform_int_distribution<int> gap(2, 20);
  std::uniform_real_distribution<double> coord(-200, 800);
  std::uniform_real_distribution<double> size(2, 300);
  for (int k = 0; k < 1000; ++k) {
    const int t1 = start(rng);
    const int t2 = t1 + gap(rng);
    const BBox a(coord(rng), coord(rng), size(rng), size(rng));
    const BBox b(coord(rng), coord(rng), size(rng), size(rng));
    TrackDump d;
    d.add(7, {t1, a, 0.5, false});
    d.add(7, {t2, b, 0.5, false});
    const TrackDump out = interpolate(d, {20});
    ASSERT_EQ(out.box_count(), static_cast<std::size_t>(t2 - t1 + 1));
    const auto pa = a.tlbr();
    const auto pb = b.tlbr();
    for (int t = t1 + 1; t < t2; ++t) {
      const auto got = at_frame(out, 7, t)->box.tlbr();
      for (int c = 0; c < 4; ++c) {
        ASSERT_NEAR(got[c], oracle::lerp_coordinate(pa[c], pb[c], t1, t2, t), 1e-9)
            << "gap " << k << " t " << t << " coord " << c;
      }
    }
  }
}

TEST(Interpolate, IdempotentEndpointPreservingConvex) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 200; ++k) {
    const TrackDump d = random_dump(rng);
    const TrackDump once = interpolate(d, {20});
    ASSERT_EQ(interpolate(once, {20}), once);
    for (const auto& [id, seq] : d.tracks()) {
      for (const TrackEntry& e : seq) {
        const TrackEntry* kept = at_frame(once, id, e.frame);
        ASSERT_NE(kept, nullptr);
        ASSERT_EQ(*kept, e);
      }
      const auto& filled = once.tracks().at(id);
      for (std::size_t i = 0; i < filled.size(); ++i) {
        if (!filled[i].interpolated) continue;
        // Anchors are the nearest original entries on each side.
        auto before = std::find_if(seq.rbegin(), seq.rend(),
                                   [&](const TrackEntry& e) { return e.frame < filled[i].frame; });
        auto after = std::find_if(seq.begin(), seq.end(),
                                  [&](const TrackEntry& e) { return e.frame > filled[i].frame; });
        ASSERT_TRUE(before != seq.rend() && after != seq.end());
        const auto p = before->box.tlbr(), q = after->box.tlbr(), g = filled[i].box.tlbr();
        for (int c = 0; c < 4; ++c) {
          ASSERT_GE(g[c], std::min(p[c], q[c]) - 1e-9);
          ASSERT_LE(g[c], std::max(p[c], q[c]) + 1e-9);
        }
      }
    }
  }
}

TEST(Interpolate, NoExtrapolationPastTrackEnds) {
  TrackDump d;
  d.add(1, entry_tlbr(5, 0, 0, 10, 10));
  d.add(1, entry_tlbr(8, 0, 0, 10, 10));
  const TrackDump out = interpolate(d, {20});
  EXPECT_EQ(out.tracks().at(1).front().frame, 5);
  EXPECT_EQ(out.tracks().at(1).back().frame, 8);
}

TEST(FilterPublic, StrictThreshold) {
  const std::vector<Detection> pub{{1, BBox(0, 0, 10, 10), 1.0}};
  const std::vector<Detection> cands{
      {1, BBox(0, 0, 10, 10), 0.9},   // identical
      {1, BBox(50, 50, 10, 10), 0.9}, // disjoint
      {1, BBox(0, 0, 10, 8), 0.9},    // IoU 80 / 100
      {1, BBox(0, 0, 10, 9), 0.9},    // IoU 0.9
  };
  ASSERT_DOUBLE_EQ(iou(cands[2].box, pub[0].box), 0.8);
  const std::vector<Detection> kept = filter_public(cands, pub);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].box, cands[0].box);
  EXPECT_EQ(kept[1].box, cands[3].box);
  EXPECT_TRUE(filter_public(cands, {}).empty());
}
