#include "bytetrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bytetrack {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<int> parent_;
};

// Classic potentials-based Hungarian method for an n x m matrix with n <= m.
// Returns, for every row, the column it is assigned to.
std::vector<int> hungarian_rows_le_cols(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

// Solves one connected component given by its row and column index lists.
void solve_component(const CostMatrix& cost, const std::vector<int>& rows,
                     const std::vector<int>& cols,
                     std::vector<std::pair<int, int>>& matches) {
  const bool transpose = rows.size() > cols.size();
  const std::vector<int>& r_idx = transpose ? cols : rows;
  const std::vector<int>& c_idx = transpose ? rows : cols;
  const auto nr = static_cast<Eigen::Index>(r_idx.size());
  const auto nc = static_cast<Eigen::Index>(c_idx.size());

  auto at = [&](Eigen::Index i, Eigen::Index j) -> std::pair<double, bool> {
    const int r = transpose ? c_idx[j] : r_idx[i];
    const int c = transpose ? r_idx[i] : c_idx[j];
    return {cost.values(r, c), cost.feasible(r, c)};
  };

  // Shift feasible costs to start at zero, then price infeasible cells above
  // any achievable difference so that cardinality dominates total cost.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) {
      const auto [c, ok] = at(i, j);
      if (!ok) continue;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  const double big = (static_cast<double>(nr) + 1.0) * (hi - lo + 1.0);

  Eigen::MatrixXd work(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) {
      const auto [c, ok] = at(i, j);
      work(i, j) = ok ? c - lo : big;
    }
  }

  const std::vector<int> assigned = hungarian_rows_le_cols(work);
  for (Eigen::Index i = 0; i < nr; ++i) {
    const int j = assigned[static_cast<std::size_t>(i)];
    if (j < 0) continue;
    const int r = transpose ? c_idx[j] : r_idx[i];
    const int c = transpose ? r_idx[i] : c_idx[j];
    if (cost.feasible(r, c)) matches.emplace_back(r, c);
  }
}

}  // namespace

CostMatrix CostMatrix::dense(Eigen::MatrixXd values) {
  CostMatrix m;
  m.feasible = BoolMatrix::Constant(values.rows(), values.cols(), true);
  m.values = std::move(values);
  return m;
}

CostMatrix CostMatrix::from_iou(const Eigen::MatrixXd& similarity, double min_iou) {
  CostMatrix m;
  m.values = (1.0 - similarity.array()).matrix();
  const double bound = 1.0 - min_iou;
  m.feasible = (m.values.array() <= bound).matrix();
  return m;
}

Assignment min_cost_assignment(const CostMatrix& cost) {
  if (cost.feasible.rows() != cost.values.rows() || cost.feasible.cols() != cost.values.cols()) {
    throw std::invalid_argument("min_cost_assignment: feasibility mask shape mismatch");
  }
  const int nr = static_cast<int>(cost.rows());
  const int nc = static_cast<int>(cost.cols());

  // Rows are nodes [0, nr), columns are nodes [nr, nr + nc).
  DisjointSets sets(nr + nc);
  std::vector<char> row_live(static_cast<std::size_t>(nr), 0);
  std::vector<char> col_live(static_cast<std::size_t>(nc), 0);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nc; ++j) {
      if (!cost.feasible(i, j)) continue;
      if (!std::isfinite(cost.values(i, j))) {
        throw std::invalid_argument("min_cost_assignment: feasible cost must be finite");
      }
      row_live[i] = 1;
      col_live[j] = 1;
      sets.unite(i, nr + j);
    }
  }

  // Group live rows/cols by component root; roots visited in ascending order.
  std::vector<std::vector<int>> comp_rows(static_cast<std::size_t>(nr + nc));
  std::vector<std::vector<int>> comp_cols(static_cast<std::size_t>(nr + nc));
  for (int i = 0; i < nr; ++i) {
    if (row_live[i]) comp_rows[sets.find(i)].push_back(i);
  }
  for (int j = 0; j < nc; ++j) {
    if (col_live[j]) comp_cols[sets.find(nr + j)].push_back(j);
  }

  Assignment out;
  for (std::size_t root = 0; root < comp_rows.size(); ++root) {
    if (comp_rows[root].empty()) continue;
    solve_component(cost, comp_rows[root], comp_cols[root], out.matches);
  }
  std::sort(out.matches.begin(), out.matches.end());

  std::vector<char> row_used(static_cast<std::size_t>(nr), 0);
  std::vector<char> col_used(static_cast<std::size_t>(nc), 0);
  for (const auto& [r, c] : out.matches) {
    row_used[r] = 1;
    col_used[c] = 1;
  }
  for (int i = 0; i < nr; ++i) {
    if (!row_used[i]) out.unmatched_rows.push_back(i);
  }
  for (int j = 0; j < nc; ++j) {
    if (!col_used[j]) out.unmatched_cols.push_back(j);
  }
  return out;
}

Assignment min_cost_assignment(const Eigen::MatrixXd& cost, double min_iou) {
  if (!(min_iou >= 0.0 && min_iou < 1.0)) {
    throw std::invalid_argument("min_cost_assignment: min_iou must lie in [0, 1)");
  }
  CostMatrix m;
  m.values = cost;
  m.feasible = (cost.array() <= 1.0 - min_iou).matrix();
  return min_cost_assignment(m);
}

double total_cost(const Eigen::MatrixXd& cost, const Assignment& a) {
  double sum = 0.0;
  for (const auto& [r, c] : a.matches) sum += cost(r, c);
  return sum;
}

}  // namespace bytetrack
