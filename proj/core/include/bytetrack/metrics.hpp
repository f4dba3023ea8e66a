#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bytetrack/geometry.hpp"
#include "bytetrack/track_dump.hpp"

namespace bytetrack {

/// MOT17 pedestrian class id.
inline constexpr int kPedestrianClass = 1;

/// Ground-truth row. Only `considered` rows count as objects to track;
/// `distractor` rows (static person, reflection, ...) are never counted but
/// can absorb predictions when distractor filtering is on.
struct GtEntry {
  int frame = 0;
  int identity = 0;
  BBox box{0.0, 0.0, 1.0, 1.0};
  bool considered = true;
  bool distractor = false;
  int cls = kPedestrianClass;
  double visibility = 1.0;
};

/// MOT17 distractor classes: person on vehicle, static person, distractor, reflection.
bool is_distractor_class(int cls);

struct EvalOptions {
  double iou_min = 0.5;
  // Drop predictions whose best gt match is a distractor row.
  bool ignore_distractors = true;
};

struct FrameTrace {
  int frame = 0;
  std::vector<std::pair<int, int>> matches;  // (gt identity, predicted identity)
  int fp = 0;
  int fn = 0;
  int ids = 0;
};

struct ClearMotCounts {
  long fp = 0;
  long fn = 0;
  long ids = 0;
  long num_gt = 0;
  long num_pred = 0;
  std::vector<FrameTrace> trace;

  /// 1 - (fp + fn + ids) / num_gt; empty when num_gt == 0.
  std::optional<double> mota() const;
};

struct IdentityCounts {
  long idtp = 0;
  long idfp = 0;
  long idfn = 0;
  /// Identity pairs of the optimal global matching (gt identity, predicted identity).
  std::vector<std::pair<int, int>> pairs;

  double idf1() const;
};

/// Frame-by-frame CLEAR matching. Per frame, previous correspondences that
/// still overlap by at least iou_min are kept, the rest are matched by
/// min-cost assignment on 1 - IoU, and an identity switch is counted whenever
/// a gt object is matched to a different prediction than at its last match.
ClearMotCounts clear_mot(std::span<const GtEntry> gt, const TrackDump& pred,
                         const EvalOptions& opts = {});

/// Global identity matching (truth-to-result bipartite construction) between
/// gt and predicted trajectories, counting frames with IoU >= iou_min.
IdentityCounts identity_metrics(std::span<const GtEntry> gt, const TrackDump& pred,
                                const EvalOptions& opts = {});

/// Counts for one sequence, ready to be summed.
struct SequenceCounts {
  std::string name;
  long fp = 0;
  long fn = 0;
  long ids = 0;
  long num_gt = 0;
  long num_pred = 0;
  long idtp = 0;
  long idfp = 0;
  long idfn = 0;
};

struct EvalResult {
  std::optional<double> mota;
  double idf1 = 0.0;
  long fp = 0;
  long fn = 0;
  long ids = 0;
  long num_gt = 0;
  long num_pred = 0;
  long idtp = 0;
  long idfp = 0;
  long idfn = 0;
};

SequenceCounts evaluate_sequence(std::span<const GtEntry> gt, const TrackDump& pred,
                                 const EvalOptions& opts = {}, std::string name = {});

/// Micro-average: counts are summed before the ratios are formed.
EvalResult aggregate(std::span<const SequenceCounts> sequences);

}  // namespace bytetrack
