#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "bytetrack/geometry.hpp"

namespace bytetrack {

struct TrackEntry {
  int frame = 0;
  BBox box{0.0, 0.0, 1.0, 1.0};
  double score = 0.0;
  bool interpolated = false;

  friend bool operator==(const TrackEntry&, const TrackEntry&) = default;
};

/// Offline view of tracker output: per identity, entries with strictly
/// increasing frame numbers.
class TrackDump {
 public:
  using Map = std::map<int, std::vector<TrackEntry>>;

  /// Inserts keeping frame order. Throws std::invalid_argument if the
  /// identity already has an entry at that frame.
  void add(int id, const TrackEntry& entry);

  const Map& tracks() const { return tracks_; }
  Map& mutable_tracks() { return tracks_; }

  bool empty() const { return tracks_.empty(); }
  std::size_t identity_count() const { return tracks_.size(); }
  std::size_t box_count() const;

  friend bool operator==(const TrackDump&, const TrackDump&) = default;

 private:
  Map tracks_;
};

}  // namespace bytetrack
