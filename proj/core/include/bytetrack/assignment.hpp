#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace bytetrack {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Dense cost matrix with a feasibility mask of the same shape. Infeasible
/// entries never appear in a returned match regardless of their value.
struct CostMatrix {
  Eigen::MatrixXd values;
  BoolMatrix feasible;

  /// All entries feasible.
  static CostMatrix dense(Eigen::MatrixXd values);
  /// cost = 1 - similarity; entries with cost > 1 - min_iou are infeasible.
  static CostMatrix from_iou(const Eigen::MatrixXd& similarity, double min_iou);

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

struct Assignment {
  std::vector<std::pair<int, int>> matches;  // (row, col), ascending by row
  std::vector<int> unmatched_rows;           // ascending
  std::vector<int> unmatched_cols;           // ascending
};

/// Exact rectangular assignment: among matchings that use only feasible
/// entries, returns one of maximum cardinality and, among those, one of
/// minimum total cost.
///
/// The problem is split into connected components of the feasibility graph
/// and each component is solved with a shortest-augmenting-path Hungarian
/// method (O(n^2 m)). Rows are processed in ascending order and columns are
/// scanned in ascending order with strict comparisons, so the result is fully
/// deterministic for a given input.
Assignment min_cost_assignment(const CostMatrix& cost);

/// Treats `cost` as 1 - IoU: entries with cost > 1 - min_iou are infeasible.
/// Requires 0 <= min_iou < 1 (std::invalid_argument otherwise).
Assignment min_cost_assignment(const Eigen::MatrixXd& cost, double min_iou);

/// Sum of cost(row, col) over the matches, in match order.
double total_cost(const Eigen::MatrixXd& cost, const Assignment& a);

}  // namespace bytetrack
