#include "bytetrack/track_dump.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace bytetrack {

void TrackDump::add(int id, const TrackEntry& entry) {
  auto& seq = tracks_[id];
  if (seq.empty() || seq.back().frame < entry.frame) {
    seq.push_back(entry);
    return;
  }
  auto it = std::lower_bound(seq.begin(), seq.end(), entry.frame,
                             [](const TrackEntry& e, int f) { return e.frame < f; });
  if (it != seq.end() && it->frame == entry.frame) {
    throw std::invalid_argument("TrackDump: identity " + std::to_string(id) +
                                " already has an entry at frame " + std::to_string(entry.frame));
  }
  seq.insert(it, entry);
}

std::size_t TrackDump::box_count() const {
  std::size_t n = 0;
  for (const auto& [id, seq] : tracks_) n += seq.size();
  return n;
}

}  // namespace bytetrack
