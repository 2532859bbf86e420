#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "robust_shannon/classical.hpp"
#include "robust_shannon/spd_matrix.hpp"

namespace robust_shannon {

/// n x d points, one draw per row.
struct SampleCloud {
  Eigen::MatrixXd points;
  std::uint64_t seed = 0;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

/// n i.i.d. draws mean + V diag(sqrt(lambda)) z, z ~ N(0, I).
SampleCloud sample_gaussian(const GaussianLawd& law, Eigen::Index n, std::uint64_t seed);

constexpr Eigen::Index kMaxExactW2Points = 512;

/// Exact W2 between equal-weight clouds of the same size (assignment on
/// squared Euclidean costs). Throws TooLargeForExact above 512 points.
double empirical_w2(const SampleCloud& a, const SampleCloud& b);

struct GelbrichReport {
  double empirical;
  double gelbrich_closed_form;
  bool lower_bound_ok;
};

/// Draws n points from each law and compares empirical W2 with the
/// closed-form Gaussian W2; ok when empirical >= closed_form * (1 - slack).
GelbrichReport check_gelbrich(const GaussianLawd& p, const GaussianLawd& q, Eigen::Index n, std::uint64_t seed,
                              double slack = 0.15);

enum class CompoundKind { rdf, capacity };

/// Exhaustive grid over root spectra u in prod [max(0, s_i - r), s_i + r]
/// with ||u - s|| <= r, around a diagonal center with s = sqrt(diag).
/// Returns the grid max of the RDF or grid min of the capacity (H = I).
double brute_force_compound(CompoundKind kind, const SpdMatrixd& center, double radius, double budget,
                            double grid_step);

}  // namespace robust_shannon
