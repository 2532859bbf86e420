#include "robust_shannon/assignment.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>

#include "robust_shannon/errors.hpp"

namespace robust_shannon {

std::vector<int> solve_assignment(const CostMatrix& cost) {
  if (cost.rows() != cost.cols()) throw DimensionMismatch("solve_assignment: cost matrix must be square");
  const int n = static_cast<int>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();

  // 1-based; index 0 is the virtual source column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> row_of(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (int i = 1; i <= n; ++i) {
    row_of[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = row_of[j0];
      const double* row = cost.data() + static_cast<std::ptrdiff_t>(i0 - 1) * n;
      const double ui = u[i0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - ui - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const int j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> column(n);
  for (int j = 1; j <= n; ++j) column[row_of[j] - 1] = j - 1;
  return column;
}

double assignment_cost(const CostMatrix& cost, const std::vector<int>& column) {
  double total = 0.0;
  for (std::size_t i = 0; i < column.size(); ++i) total += cost(static_cast<Eigen::Index>(i), column[i]);
  return total;
}

}  // namespace robust_shannon
