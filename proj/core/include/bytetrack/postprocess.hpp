#pragma once

#include <span>
#include <vector>

#include "bytetrack/geometry.hpp"
#include "bytetrack/track_dump.hpp"

namespace bytetrack {

struct InterpConfig {
  int sigma = 20;  // largest frame gap t2 - t1 that is filled
};

/// Fills gaps inside each identity by linear interpolation of the tlbr
/// corners (and of the score) between the two anchoring entries. Gaps with
/// t2 - t1 > sigma are left alone, and nothing is extrapolated past the first
/// or last entry. Inserted entries are flagged `interpolated`.
TrackDump interpolate(const TrackDump& tracks, const InterpConfig& cfg);

/// True when `box` has IoU strictly greater than `min_iou` with some public box.
bool overlaps_public(const BBox& box, std::span<const Detection> public_dets,
                     double min_iou = 0.8);

/// Keeps the candidates (in order) that pass overlaps_public().
std::vector<Detection> filter_public(std::span<const Detection> candidates,
                                     std::span<const Detection> public_dets,
                                     double min_iou = 0.8);

}  // namespace bytetrack
