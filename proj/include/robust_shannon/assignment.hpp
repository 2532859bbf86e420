#pragma once

#include <vector>

#include <Eigen/Dense>

namespace robust_shannon {

using CostMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Exact minimum-cost perfect matching on a square cost matrix
/// (shortest augmenting paths with dual potentials, O(n^3)).
/// Returns column[i] = column matched to row i.
std::vector<int> solve_assignment(const CostMatrix& cost);

double assignment_cost(const CostMatrix& cost, const std::vector<int>& column);

}  // namespace robust_shannon
