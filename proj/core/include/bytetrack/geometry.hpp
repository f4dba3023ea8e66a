#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace bytetrack {

/// Axis-aligned box stored as top-left corner plus size (MOTChallenge tlwh).
///
/// Width and height are strictly positive; the constructor throws
/// std::invalid_argument otherwise. Coordinates are not clipped to any image
/// bounds, since annotated boxes may extend past the frame.
class BBox {
 public:
  BBox(double left, double top, double width, double height);

  static BBox from_tlwh(double left, double top, double width, double height) {
    return BBox(left, top, width, height);
  }
  static BBox from_tlbr(double x1, double y1, double x2, double y2);
  /// Inverse of to_cxcyah(): (center-x, center-y, aspect w/h, height).
  static BBox from_cxcyah(const Eigen::Vector4d& m);

  double left() const { return left_; }
  double top() const { return top_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double right() const { return left_ + width_; }
  double bottom() const { return top_ + height_; }
  double area() const { return width_ * height_; }

  std::array<double, 4> tlwh() const { return {left_, top_, width_, height_}; }
  std::array<double, 4> tlbr() const { return {left_, top_, right(), bottom()}; }
  Eigen::Vector4d to_cxcyah() const;

  BBox translated(double dx, double dy) const {
    return BBox(left_ + dx, top_ + dy, width_, height_);
  }

  friend bool operator==(const BBox&, const BBox&) = default;

 private:
  double left_;
  double top_;
  double width_;
  double height_;
};

/// One detector output: a box, its confidence and the 1-based frame it
/// belongs to.
struct Detection {
  int frame = 1;
  BBox box{0.0, 0.0, 1.0, 1.0};
  double score = 0.0;
};

/// Intersection over union with continuous (not pixel-inclusive) extents.
double iou(const BBox& a, const BBox& b);

/// Area of the intersection of two boxes, 0 when they do not overlap.
double intersection_area(const BBox& a, const BBox& b);

/// rows = tracks, cols = detections, entries in [0, 1].
using SimilarityMatrix = Eigen::MatrixXd;

SimilarityMatrix iou_matrix(std::span<const BBox> tracks, std::span<const BBox> dets);

}  // namespace bytetrack
