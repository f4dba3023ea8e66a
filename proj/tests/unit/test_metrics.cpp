#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bytetrack/metrics.hpp"
#include "oracles.hpp"

using namespace bytetrack;

namespace {

GtEntry gt_row(int frame, int id, const BBox& box) {
  GtEntry g;
  g.frame = frame;
  g.identity = id;
  g.box = box;
  return g;
}

BBox lane(int id) { return BBox(100.0 * id, 100, 40, 80); }

// Random gt/pred identity graph: each gt identity occupies a lane in random
// frames; each prediction box either sits exactly on a present gt box or
// far away from everything.
struct Graph {
  std::vector<GtEntry> gt;
  TrackDump pred;
  int ng = 0;
  int np = 0;
};

Graph random_graph(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 4);
  std::bernoulli_distribution coin(0.6);
  Graph g;
  g.ng = count(rng);
  g.np = count(rng);
  const int frames = 8;
  for (int f = 1; f <= frames; ++f) {
    std::vector<int> present;
    for (int id = 1; id <= g.ng; ++id) {
      if (coin(rng)) {
        g.gt.push_back(gt_row(f, id, lane(id)));
        present.push_back(id);
      }
    }
    std::vector<int> free_lanes = present;
    std::shuffle(free_lanes.begin(), free_lanes.end(), rng);
    for (int p = 1; p <= g.np; ++p) {
      if (!coin(rng)) continue;
      if (!free_lanes.empty() && coin(rng)) {
        g.pred.add(10 + p, {f, lane(free_lanes.back()), 1.0, false});
        free_lanes.pop_back();
      } else {
        g.pred.add(10 + p, {f, BBox(5000.0 + 100 * p, 5000, 40, 80), 1.0, false});
      }
    }
  }
  return g;
}

std::vector<std::vector<long>> overlap_weights(const Graph& g) {
  std::vector<std::vector<long>> w(static_cast<std::size_t>(g.ng),
                                   std::vector<long>(static_cast<std::size_t>(g.np), 0));
  for (const GtEntry& e : g.gt) {
    for (const auto& [pid, seq] : g.pred.tracks()) {
      for (const TrackEntry& t : seq) {
        if (t.frame == e.frame && iou(t.box, e.box) >= 0.5) ++w[e.identity - 1][pid - 11];
      }
    }
  }
  return w;
}

TrackDump relabel(const TrackDump& d, const std::vector<int>& new_ids) {
  TrackDump out;
  std::size_t k = 0;
  for (const auto& [id, seq] : d.tracks()) {
    for (const TrackEntry& e : seq) out.add(new_ids[k], e);
    ++k;
  }
  return out;
}

}  // namespace

TEST(ClearMot, PerfectTracker) {
  std::vector<GtEntry> gt;
  TrackDump pred;
  for (int f = 1; f <= 10; ++f) {
    for (int id = 1; id <= 3; ++id) {
      gt.push_back(gt_row(f, id, lane(id).translated(f, 0)));
      pred.add(id + 40, {f, lane(id).translated(f, 0), 0.9, false});
    }
  }
  const ClearMotCounts c = clear_mot(gt, pred);
  EXPECT_EQ(c.fp, 0);
  EXPECT_EQ(c.fn, 0);
  EXPECT_EQ(c.ids, 0);
  EXPECT_DOUBLE_EQ(*c.mota(), 1.0);
  EXPECT_DOUBLE_EQ(identity_metrics(gt, pred).idf1(), 1.0);
}

TEST(ClearMot, MissEverything) {
  std::vector<GtEntry> gt;
  for (int f = 1; f <= 10; ++f) {
    for (int id = 1; id <= 5; ++id) gt.push_back(gt_row(f, id, lane(id)));
  }
  const ClearMotCounts c = clear_mot(gt, TrackDump{});
  EXPECT_EQ(c.fn, 50);
  EXPECT_EQ(c.num_gt, 50);
  EXPECT_DOUBLE_EQ(*c.mota(), 0.0);
  const IdentityCounts i = identity_metrics(gt, TrackDump{});
  EXPECT_EQ(i.idfn, 50);
  EXPECT_DOUBLE_EQ(i.idf1(), 0.0);
}

TEST(ClearMot, SplitIdentity) {
  std::vector<GtEntry> gt;
  TrackDump pred;
  for (int f = 1; f <= 10; ++f) {
    gt.push_back(gt_row(f, 1, lane(1)));
    pred.add(f <= 5 ? 1 : 2, {f, lane(1), 0.9, false});
  }
  const ClearMotCounts c = clear_mot(gt, pred);
  EXPECT_EQ(c.ids, 1);
  EXPECT_EQ(c.fp, 0);
  EXPECT_EQ(c.fn, 0);
  EXPECT_NEAR(*c.mota(), 0.9, 1e-12);
  ASSERT_EQ(c.trace.size(), 10u);
  EXPECT_EQ(c.trace[5].ids, 1);

  const IdentityCounts i = identity_metrics(gt, pred);
  EXPECT_EQ(i.idtp, 5);
  EXPECT_EQ(i.idfp, 5);
  EXPECT_EQ(i.idfn, 5);
  EXPECT_NEAR(i.idf1(), 0.5, 1e-12);
}

TEST(ClearMot, SwitchAfterGapStillCounts) {
  // Matched to A, unmatched for a while, then matched to B.
  std::vector<GtEntry> gt;
  TrackDump pred;
  for (int f = 1; f <= 9; ++f) gt.push_back(gt_row(f, 1, lane(1)));
  for (int f = 1; f <= 3; ++f) pred.add(1, {f, lane(1), 1, false});
  for (int f = 7; f <= 9; ++f) pred.add(2, {f, lane(1), 1, false});
  const ClearMotCounts c = clear_mot(gt, pred);
  EXPECT_EQ(c.ids, 1);
  EXPECT_EQ(c.fn, 3);
}

TEST(ClearMot, PreviousMatchIsKeptOverBetterOverlap) {
  // Pred 1 keeps gt 1 while IoU stays >= 0.5, even when pred 2 sits exactly on it.
  std::vector<GtEntry> gt{gt_row(1, 1, BBox(0, 0, 10, 10)), gt_row(2, 1, BBox(0, 0, 10, 10))};
  TrackDump pred;
  pred.add(1, {1, BBox(0, 0, 10, 10), 1, false});
  pred.add(1, {2, BBox(2, 0, 10, 10), 1, false});  // IoU 80/120
  pred.add(2, {2, BBox(0, 0, 10, 10), 1, false});
  const ClearMotCounts c = clear_mot(gt, pred);
  EXPECT_EQ(c.ids, 0);
  EXPECT_EQ(c.fp, 1);
  EXPECT_EQ(c.trace[1].matches, (std::vector<std::pair<int, int>>{{1, 1}}));
}

TEST(ClearMot, NoGroundTruthLeavesMotaAbsent) {
  TrackDump pred;
  pred.add(1, {1, BBox(0, 0, 10, 10), 1, false});
  const ClearMotCounts c = clear_mot({}, pred);
  EXPECT_EQ(c.fp, 1);
  EXPECT_FALSE(c.mota().has_value());
}

TEST(ClearMot, DistractorMatchesAreIgnored) {
  GtEntry d = gt_row(1, 9, BBox(500, 0, 40, 80));
  d.considered = false;
  d.distractor = true;
  d.cls = 7;
  std::vector<GtEntry> gt{gt_row(1, 1, lane(1)), d};
  TrackDump pred;
  pred.add(1, {1, lane(1), 1, false});
  pred.add(2, {1, BBox(501, 0, 40, 80), 1, false});
  pred.add(3, {1, BBox(900, 0, 40, 80), 1, false});
  EXPECT_EQ(clear_mot(gt, pred).fp, 1);
  EXPECT_EQ(identity_metrics(gt, pred).idfp, 1);
  EvalOptions keep;
  keep.ignore_distractors = false;
  EXPECT_EQ(clear_mot(gt, pred, keep).fp, 2);
}

TEST(IdentityMetrics, OnePredictionAcrossTwoObjects) {
  std::vector<GtEntry> gt;
  TrackDump pred;
  for (int f = 1; f <= 10; ++f) {
    gt.push_back(gt_row(f, 1, lane(1)));
    pred.add(1, {f, lane(1), 1, false});
  }
  for (int f = 11; f <= 20; ++f) {
    gt.push_back(gt_row(f, 2, lane(2)));
    pred.add(1, {f, lane(2), 1, false});
  }
  const IdentityCounts i = identity_metrics(gt, pred);
  EXPECT_EQ(i.idtp, 10);
  EXPECT_EQ(i.idfp, 10);
  EXPECT_EQ(i.idfn, 10);
  EXPECT_NEAR(i.idf1(), 0.5, 1e-12);
  EXPECT_EQ(clear_mot(gt, pred).ids, 0);
}

TEST(IdentityMetrics, EqualsBruteForceOnSmallGraphs) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 500; ++k) {
    const Graph g = random_graph(rng);
    const IdentityCounts i = identity_metrics(g.gt, g.pred);
    const long expected = oracle::brute_force_identity_tp(overlap_weights(g));
    ASSERT_EQ(i.idtp, expected) << "graph " << k;
    ASSERT_EQ(i.idfn, static_cast<long>(g.gt.size()) - expected);
    ASSERT_EQ(i.idfp, static_cast<long>(g.pred.box_count()) - expected);
    ASSERT_GE(i.idf1(), 0.0);
    ASSERT_LE(i.idf1(), 1.0);
  }
}

TEST(Metrics, LabelPermutationInvariance) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 200; ++k) {
    const Graph g = random_graph(rng);
    std::vector<int> labels(g.pred.identity_count());
    std::iota(labels.begin(), labels.end(), 100);
    std::shuffle(labels.begin(), labels.end(), rng);
    const TrackDump renamed = relabel(g.pred, labels);
    const ClearMotCounts a = clear_mot(g.gt, g.pred);
    const ClearMotCounts b = clear_mot(g.gt, renamed);
    ASSERT_EQ(a.fp, b.fp);
    ASSERT_EQ(a.fn, b.fn);
    ASSERT_EQ(a.ids, b.ids);
    ASSERT_EQ(identity_metrics(g.gt, g.pred).idtp, identity_metrics(g.gt, renamed).idtp);
    if (a.mota()) ASSERT_LE(*a.mota(), 1.0);
  }
}

TEST(Aggregate, SumsCountsBeforeRatios) {
  SequenceCounts a;
  a.fp = 1;
  a.fn = 1;
  a.num_gt = 10;
  SequenceCounts b;
  b.fn = 2;
  b.ids = 1;
  b.num_gt = 10;
  const std::vector<SequenceCounts> both{a, b};
  EXPECT_NEAR(*aggregate(both).mota, 0.75, 1e-12);

  const std::vector<SequenceCounts> one{a};
  EXPECT_NEAR(*aggregate(one).mota, 0.8, 1e-12);

  const EvalResult empty = aggregate({});
  EXPECT_FALSE(empty.mota.has_value());
  EXPECT_EQ(empty.num_gt, 0);
}

TEST(Aggregate, MatchesSequenceEvaluation) {
  std::vector<GtEntry> gt;
  TrackDump pred;
  for (int f = 1; f <= 10; ++f) {
    gt.push_back(gt_row(f, 1, lane(1)));
    pred.add(f <= 5 ? 1 : 2, {f, lane(1), 0.9, false});
  }
  const SequenceCounts s = evaluate_sequence(gt, pred, {}, "split");
  const std::vector<SequenceCounts> v{s};
  const EvalResult r = aggregate(v);
  EXPECT_NEAR(*r.mota, 0.9, 1e-12);
  EXPECT_NEAR(r.idf1, 0.5, 1e-12);
}
