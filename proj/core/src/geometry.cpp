#include "bytetrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bytetrack {

BBox::BBox(double left, double top, double width, double height)
    : left_(left), top_(top), width_(width), height_(height) {
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(left) || !std::isfinite(top) ||
      !std::isfinite(width) || !std::isfinite(height)) {
    throw std::invalid_argument("BBox requires finite coordinates and positive size, got w=" +
                                std::to_string(width) + " h=" + std::to_string(height));
  }
}

BBox BBox::from_tlbr(double x1, double y1, double x2, double y2) {
  return BBox(x1, y1, x2 - x1, y2 - y1);
}

BBox BBox::from_cxcyah(const Eigen::Vector4d& m) {
  const double h = m[3];
  const double w = m[2] * h;
  return BBox(m[0] - w / 2.0, m[1] - h / 2.0, w, h);
}

Eigen::Vector4d BBox::to_cxcyah() const {
  return {left_ + width_ / 2.0, top_ + height_ / 2.0, width_ / height_, height_};
}

double intersection_area(const BBox& a, const BBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

SimilarityMatrix iou_matrix(std::span<const BBox> tracks, std::span<const BBox> dets) {
  SimilarityMatrix m(static_cast<Eigen::Index>(tracks.size()),
                     static_cast<Eigen::Index>(dets.size()));
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    for (std::size_t j = 0; j < dets.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = iou(tracks[i], dets[j]);
    }
  }
  return m;
}

}  // namespace bytetrack
