#include "bytetrack/tracker.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bytetrack/assignment.hpp"
#include "bytetrack/postprocess.hpp"

namespace bytetrack {

namespace {

std::optional<BBox> box_from_mean(const StateVector& mean) {
  const double a = mean[2];
  const double h = mean[3];
  if (!(a > 0.0) || !(h > 0.0)) return std::nullopt;
  return BBox::from_cxcyah(mean.head<4>());
}

// Canonical processing order: score descending, then left, top, width, height.
std::vector<std::size_t> canonical_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const Detection& a = dets[i];
    const Detection& b = dets[j];
    if (a.score != b.score) return a.score > b.score;
    if (a.box.left() != b.box.left()) return a.box.left() < b.box.left();
    if (a.box.top() != b.box.top()) return a.box.top() < b.box.top();
    if (a.box.width() != b.box.width()) return a.box.width() < b.box.width();
    return a.box.height() < b.box.height();
  });
  return order;
}

Eigen::MatrixXd iou_cost(const std::vector<Track*>& tracks, std::span<const Detection> all,
                         const std::vector<std::size_t>& det_idx) {
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(tracks.size()),
                       static_cast<Eigen::Index>(det_idx.size()));
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const std::optional<BBox> tb = tracks[i]->box();
    for (std::size_t j = 0; j < det_idx.size(); ++j) {
      const double sim = tb ? iou(*tb, all[det_idx[j]].box) : 0.0;
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0 - sim;
    }
  }
  return cost;
}

}  // namespace

const char* to_string(AssociationMode mode) {
  switch (mode) {
    case AssociationMode::Byte:
      return "byte";
    case AssociationMode::SingleStage:
      return "single";
  }
  return "unknown";
}

std::optional<AssociationMode> parse_mode(std::string_view text) {
  if (text == "byte") return AssociationMode::Byte;
  if (text == "single" || text == "singlestage" || text == "sort") {
    return AssociationMode::SingleStage;
  }
  return std::nullopt;
}

void TrackerConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(tau_low) || !in_unit(tau_high) || !(tau_low < tau_high)) {
    throw std::invalid_argument("TrackerConfig: require 0 <= tau_low < tau_high <= 1");
  }
  if (!(min_iou_first >= 0.0 && min_iou_first < 1.0) ||
      !(min_iou_second >= 0.0 && min_iou_second < 1.0)) {
    throw std::invalid_argument("TrackerConfig: min_iou values must lie in [0, 1)");
  }
  if (lost_ttl < 0) throw std::invalid_argument("TrackerConfig: lost_ttl must be >= 0");
  if (init_score_margin < 0.0) {
    throw std::invalid_argument("TrackerConfig: init_score_margin must be >= 0");
  }
  if (!in_unit(public_min_iou)) {
    throw std::invalid_argument("TrackerConfig: public_min_iou must lie in [0, 1]");
  }
}

std::optional<BBox> Track::box() const { return box_from_mean(motion_.mean); }

std::pair<std::vector<Detection>, std::vector<Detection>> split_by_score(
    std::span<const Detection> dets, const TrackerConfig& cfg) {
  std::vector<Detection> high;
  std::vector<Detection> low;
  for (const Detection& d : dets) {
    if (d.score > cfg.tau_high) {
      high.push_back(d);
    } else if (d.score >= cfg.tau_low) {
      low.push_back(d);
    }
  }
  return {std::move(high), std::move(low)};
}

ByteTracker::ByteTracker(TrackerConfig cfg) : cfg_(cfg), kf_(cfg.kalman) { cfg_.validate(); }

FrameResult ByteTracker::step(int frame, std::span<const Detection> dets) {
  return step_impl(frame, dets, std::nullopt);
}

FrameResult ByteTracker::step(int frame, std::span<const Detection> dets,
                              std::span<const Detection> public_dets) {
  return step_impl(frame, dets, public_dets);
}

FrameResult ByteTracker::step_impl(int frame, std::span<const Detection> dets,
                                   std::optional<std::span<const Detection>> public_dets) {
  if (frame <= last_frame_) {
    throw std::invalid_argument("ByteTracker::step: frame " + std::to_string(frame) +
                                " does not follow frame " + std::to_string(last_frame_));
  }
  last_frame_ = frame;

  report_.fates.assign(dets.size(), DetectionFate::BelowFloor);
  report_.track_ids.assign(dets.size(), -1);

  // Score split over the canonical order, so ties do not depend on input order.
  std::vector<std::size_t> high;
  std::vector<std::size_t> low;
  for (std::size_t i : canonical_order(dets)) {
    const double s = dets[i].score;
    if (s > cfg_.tau_high) {
      high.push_back(i);
    } else if (s >= cfg_.tau_low) {
      low.push_back(i);
      report_.fates[i] = DetectionFate::DiscardedLow;
    }
  }

  // Predict every live track; remember which ones were Tracked coming in.
  std::vector<Track*> pool;
  std::vector<char> was_tracked;
  pool.reserve(tracks_.size());
  for (Track& t : tracks_) {
    t.motion_ = kf_.predict(t.motion_);
    pool.push_back(&t);
    was_tracked.push_back(t.state_ == TrackState::Tracked ? 1 : 0);
  }

  std::vector<char> matched(pool.size(), 0);
  auto apply_match = [&](Track& t, std::size_t det_index, DetectionFate fate) {
    const Detection& d = dets[det_index];
    t.motion_ = kf_.update(t.motion_, d.box.to_cxcyah());
    t.state_ = TrackState::Tracked;
    t.score_ = d.score;
    t.last_frame_ = frame;
    const std::optional<BBox> b = t.box();
    t.history_.push_back({frame, b ? *b : d.box, d.score, false});
    report_.fates[det_index] = fate;
    report_.track_ids[det_index] = t.id_;
  };

  // First association: all live tracks against high-score boxes.
  std::vector<std::size_t> high_remain;
  {
    const Eigen::MatrixXd cost = iou_cost(pool, dets, high);
    const Assignment a = min_cost_assignment(cost, cfg_.min_iou_first);
    for (const auto& [r, c] : a.matches) {
      matched[r] = 1;
      apply_match(*pool[r], high[c], DetectionFate::MatchedFirst);
    }
    for (int c : a.unmatched_cols) high_remain.push_back(high[c]);
  }

  // Second association: leftover tracks against low-score boxes, IoU only.
  if (cfg_.mode == AssociationMode::Byte && !low.empty()) {
    std::vector<std::size_t> remain_idx;
    std::vector<Track*> remain;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (matched[i]) continue;
      if (cfg_.second_stage_tracked_only && !was_tracked[i]) continue;
      remain_idx.push_back(i);
      remain.push_back(pool[i]);
    }
    const Eigen::MatrixXd cost = iou_cost(remain, dets, low);
    const Assignment a = min_cost_assignment(cost, cfg_.min_iou_second);
    for (const auto& [r, c] : a.matches) {
      matched[remain_idx[r]] = 1;
      apply_match(*remain[r], low[c], DetectionFate::MatchedSecond);
    }
  }

  // Unmatched tracks become Lost; Lost tracks past the window are removed.
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (matched[i]) continue;
    Track& t = *pool[i];
    t.state_ = TrackState::Lost;
    if (frame - t.last_frame_ > cfg_.lost_ttl) t.state_ = TrackState::Removed;
  }
  auto removed_begin = std::stable_partition(tracks_.begin(), tracks_.end(), [](const Track& t) {
    return t.state_ != TrackState::Removed;
  });
  std::move(removed_begin, tracks_.end(), std::back_inserter(removed_));
  tracks_.erase(removed_begin, tracks_.end());

  // Births from unmatched high-score boxes.
  for (std::size_t i : high_remain) {
    const Detection& d = dets[i];
    const bool strong_enough = d.score > cfg_.tau_high + cfg_.init_score_margin;
    const bool public_ok =
        !public_dets || overlaps_public(d.box, *public_dets, cfg_.public_min_iou);
    if (!strong_enough || !public_ok) {
      report_.fates[i] = DetectionFate::DiscardedHigh;
      continue;
    }
    Track t;
    t.id_ = next_id_++;
    t.state_ = TrackState::Tracked;
    t.motion_ = kf_.initiate(d.box.to_cxcyah());
    t.score_ = d.score;
    t.start_frame_ = frame;
    t.last_frame_ = frame;
    t.history_.push_back({frame, d.box, d.score, false});
    report_.fates[i] = DetectionFate::NewTrack;
    report_.track_ids[i] = t.id_;
    tracks_.push_back(std::move(t));
  }

  FrameResult result;
  result.frame = frame;
  for (const Track& t : tracks_) {
    if (t.state_ != TrackState::Tracked) continue;
    if (!cfg_.emit_on_birth && t.start_frame_ == frame) continue;
    result.outputs.push_back({t.id_, t.history_.back().box, t.score_});
  }
  return result;
}

std::vector<std::vector<Detection>> group_by_frame(std::span<const Detection> dets,
                                                   int frame_count) {
  int last = std::max(frame_count, 0);
  for (const Detection& d : dets) {
    if (d.frame < 1) throw std::invalid_argument("group_by_frame: frame numbers start at 1");
    last = std::max(last, d.frame);
  }
  std::vector<std::vector<Detection>> frames(static_cast<std::size_t>(last));
  for (const Detection& d : dets) frames[static_cast<std::size_t>(d.frame - 1)].push_back(d);
  return frames;
}

TrackDump track_sequence(std::span<const Detection> dets, const TrackerConfig& cfg,
                         int frame_count) {
  const auto frames = group_by_frame(dets, frame_count);
  ByteTracker tracker(cfg);
  TrackDump dump;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    append(dump, tracker.step(static_cast<int>(k + 1), frames[k]));
  }
  return dump;
}

void append(TrackDump& dump, const FrameResult& result) {
  for (const TrackOutput& o : result.outputs) {
    dump.add(o.id, {result.frame, o.box, o.score, false});
  }
}

}  // namespace bytetrack
