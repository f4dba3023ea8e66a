#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bytetrack/geometry.hpp"
#include "bytetrack/kalman.hpp"
#include "bytetrack/track_dump.hpp"

namespace bytetrack {

enum class TrackState { Tracked, Lost, Removed };

enum class AssociationMode {
  Byte,         // high-score boxes first, then low-score boxes against leftovers
  SingleStage,  // SORT-style: only boxes above tau_high are ever associated
};

const char* to_string(AssociationMode mode);
/// Accepts "byte" and "single" (also "singlestage", "sort").
std::optional<AssociationMode> parse_mode(std::string_view text);

struct TrackerConfig {
  double tau_high = 0.6;
  double tau_low = 0.1;
  double min_iou_first = 0.2;
  double min_iou_second = 0.2;
  int lost_ttl = 30;
  AssociationMode mode = AssociationMode::Byte;

  // Restrict the second association to tracks that were Tracked before this frame.
  bool second_stage_tracked_only = false;
  // New tracks need score > tau_high + init_score_margin.
  double init_score_margin = 0.0;
  // Output a track in the frame it was born.
  bool emit_on_birth = true;
  // Public-detection protocol: birth requires IoU > this with a public box.
  double public_min_iou = 0.8;

  KalmanConfig kalman{};

  /// Throws std::invalid_argument when the thresholds are inconsistent.
  void validate() const;
};

struct HistoryEntry {
  int frame = 0;
  BBox box{0.0, 0.0, 1.0, 1.0};
  double score = 0.0;
  bool interpolated = false;
};

class Track {
 public:
  int id() const { return id_; }
  TrackState state() const { return state_; }
  const MotionState& motion() const { return motion_; }
  double score() const { return score_; }
  int start_frame() const { return start_frame_; }
  int last_frame() const { return last_frame_; }
  const std::vector<HistoryEntry>& history() const { return history_; }

  /// Box implied by the current Kalman mean; empty if the mean has drifted to
  /// a non-positive width or height.
  std::optional<BBox> box() const;

 private:
  friend class ByteTracker;

  int id_ = 0;
  TrackState state_ = TrackState::Tracked;
  MotionState motion_;
  double score_ = 0.0;
  int start_frame_ = 0;
  int last_frame_ = 0;
  std::vector<HistoryEntry> history_;
};

struct TrackOutput {
  int id = 0;
  BBox box{0.0, 0.0, 1.0, 1.0};
  double score = 0.0;
};

/// Tracked (never Lost) tracks at one frame, ascending by id.
struct FrameResult {
  int frame = 0;
  std::vector<TrackOutput> outputs;
};

/// Where an input detection ended up after one step.
enum class DetectionFate {
  MatchedFirst,    // high box matched in the first association
  MatchedSecond,   // low box matched in the second association
  NewTrack,        // unmatched high box that started a track
  DiscardedHigh,   // unmatched high box refused by the birth rules
  DiscardedLow,    // low box left unmatched (treated as background)
  BelowFloor,      // score < tau_low, never considered
};

struct StepReport {
  // Indexed like the detections passed to step().
  std::vector<DetectionFate> fates;
  // Track id each detection was assigned to, -1 when none.
  std::vector<int> track_ids;
};

/// Partitions detections by score: high = score > tau_high,
/// low = tau_low <= score <= tau_high. Everything below tau_low is dropped.
std::pair<std::vector<Detection>, std::vector<Detection>> split_by_score(
    std::span<const Detection> dets, const TrackerConfig& cfg);

/// Multi-object tracker running two-stage (or single-stage) IoU association
/// over a constant-velocity Kalman motion model.
///
/// Not thread-safe; one instance per sequence.
class ByteTracker {
 public:
  explicit ByteTracker(TrackerConfig cfg = {});

  /// Processes one frame. Frame numbers must strictly increase across calls
  /// (std::invalid_argument otherwise). Output is independent of the order
  /// of `dets`.
  FrameResult step(int frame, std::span<const Detection> dets);

  /// Same as step(), but new tracks are only born from boxes overlapping a
  /// public detection with IoU > cfg.public_min_iou.
  FrameResult step(int frame, std::span<const Detection> dets,
                   std::span<const Detection> public_dets);

  /// Tracked and Lost tracks, ascending by id.
  const std::vector<Track>& tracks() const { return tracks_; }
  const std::vector<Track>& removed_tracks() const { return removed_; }
  const StepReport& last_report() const { return report_; }
  const TrackerConfig& config() const { return cfg_; }
  int last_frame() const { return last_frame_; }

 private:
  FrameResult step_impl(int frame, std::span<const Detection> dets,
                        std::optional<std::span<const Detection>> public_dets);

  TrackerConfig cfg_;
  KalmanFilter kf_;
  std::vector<Track> tracks_;
  std::vector<Track> removed_;
  StepReport report_;
  int next_id_ = 1;
  int last_frame_ = 0;
};

/// Buckets detections by frame; element k holds frame k + 1. The result has
/// max(frame_count, largest frame seen) entries.
std::vector<std::vector<Detection>> group_by_frame(std::span<const Detection> dets,
                                                   int frame_count = 0);

/// Runs a fresh tracker over every frame in [1, frame_count] and collects the
/// outputs.
TrackDump track_sequence(std::span<const Detection> dets, const TrackerConfig& cfg,
                         int frame_count = 0);

void append(TrackDump& dump, const FrameResult& result);

}  // namespace bytetrack
