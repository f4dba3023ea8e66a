#include "bytetrack/postprocess.hpp"

#include <stdexcept>

namespace bytetrack {

TrackDump interpolate(const TrackDump& tracks, const InterpConfig& cfg) {
  if (cfg.sigma < 0) throw std::invalid_argument("interpolate: sigma must be >= 0");

  TrackDump out;
  for (const auto& [id, seq] : tracks.tracks()) {
    for (std::size_t k = 0; k < seq.size(); ++k) {
      out.add(id, seq[k]);
      if (k + 1 == seq.size()) break;

      const TrackEntry& a = seq[k];
      const TrackEntry& b = seq[k + 1];
      const int gap = b.frame - a.frame;
      if (gap <= 1 || gap > cfg.sigma) continue;

      const auto p = a.box.tlbr();
      const auto q = b.box.tlbr();
      for (int t = a.frame + 1; t < b.frame; ++t) {
        const double w = static_cast<double>(t - a.frame) / static_cast<double>(gap);
        TrackEntry e;
        e.frame = t;
        e.box = BBox::from_tlbr(p[0] + (q[0] - p[0]) * w, p[1] + (q[1] - p[1]) * w,
                                p[2] + (q[2] - p[2]) * w, p[3] + (q[3] - p[3]) * w);
        e.score = a.score + (b.score - a.score) * w;
        e.interpolated = true;
        out.add(id, e);
      }
    }
  }
  return out;
}

bool overlaps_public(const BBox& box, std::span<const Detection> public_dets, double min_iou) {
  for (const Detection& p : public_dets) {
    if (iou(box, p.box) > min_iou) return true;
  }
  return false;
}

std::vector<Detection> filter_public(std::span<const Detection> candidates,
                                     std::span<const Detection> public_dets, double min_iou) {
  std::vector<Detection> kept;
  for (const Detection& c : candidates) {
    if (overlaps_public(c.box, public_dets, min_iou)) kept.push_back(c);
  }
  return kept;
}

}  // namespace bytetrack
