#include "robust_shannon/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "robust_shannon/assignment.hpp"
#include "robust_shannon/bures_wasserstein.hpp"
#include "robust_shannon/random.hpp"
#include "robust_shannon/waterfilling.hpp"

namespace robust_shannon {

SampleCloud sample_gaussian(const GaussianLawd& law, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_gaussian: n must be >= 1");
  const Eigen::Index d = law.dim();
  const Eigen::MatrixXd factor = law.cov.eigenvectors() * law.cov.eigenvalues().cwiseSqrt().asDiagonal();
  Rng rng(seed);
  SampleCloud cloud;
  cloud.seed = seed;
  cloud.points.resize(n, d);
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal();
    cloud.points.row(i) = (law.mean + factor * z).transpose();
  }
  return cloud;
}

double empirical_w2(const SampleCloud& a, const SampleCloud& b) {
  if (a.size() != b.size()) throw DimensionMismatch("empirical_w2: clouds must have the same size");
  if (a.dim() != b.dim()) throw DimensionMismatch("empirical_w2: clouds must have the same dimension");
  if (a.size() < 1) throw DomainError("empirical_w2: clouds must be non-empty");
  if (a.size() > kMaxExactW2Points) {
    throw TooLargeForExact("empirical_w2: " + std::to_string(a.size()) + " points exceeds the exact limit of " +
                           std::to_string(kMaxExactW2Points));
  }
  if (!a.points.allFinite() || !b.points.allFinite()) throw DomainError("empirical_w2: non-finite sample");

  const Eigen::Index n = a.size();
  CostMatrix cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = (a.points.row(i) - b.points.row(j)).squaredNorm();
  // Summing the matched costs in sorted order makes the result exactly symmetric in (a, b).
  const std::vector<int> column = solve_assignment(cost);
  std::vector<double> matched(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) matched[static_cast<std::size_t>(i)] = cost(i, column[static_cast<std::size_t>(i)]);
  std::sort(matched.begin(), matched.end());
  double total = 0.0;
  for (double c : matched) total += c;
  return std::sqrt(std::max(0.0, total / static_cast<double>(n)));
}

GelbrichReport check_gelbrich(const GaussianLawd& p, const GaussianLawd& q, Eigen::Index n, std::uint64_t seed,
                              double slack) {
  if (p.dim() != q.dim()) throw DimensionMismatch("check_gelbrich: dimension mismatch");
  if (!(slack >= 0.0 && slack < 1.0)) throw DomainError("check_gelbrich: slack must lie in [0, 1)");
  const SampleCloud a = sample_gaussian(p, n, mix_seed(seed, 0));
  const SampleCloud b = sample_gaussian(q, n, mix_seed(seed, 1));
  GelbrichReport report;
  report.empirical = empirical_w2(a, b);
  report.gelbrich_closed_form = gaussian_w2(p, q);
  report.lower_bound_ok = report.empirical >= report.gelbrich_closed_form * (1.0 - slack);
  return report;
}

double brute_force_compound(CompoundKind kind, const SpdMatrixd& center, double radius, double budget,
                            double grid_step) {
  const Eigen::Index d = center.dim();
  if (d > 3) throw DomainError("brute_force_compound: dimension must be <= 3");
  if (!(grid_step > 0.0)) throw DomainError("brute_force_compound: grid_step must be positive");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw DomainError("brute_force_compound: radius must be >= 0");
  const Eigen::MatrixXd& m = center.matrix();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - Eigen::MatrixXd(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() > 1e-14 * scale) {
    throw DomainError("brute_force_compound: center must be diagonal");
  }
  if (kind == CompoundKind::rdf && !(budget > 0.0)) throw DomainError("brute_force_compound: distortion must be positive");
  if (kind == CompoundKind::capacity && !(budget >= 0.0)) throw DomainError("brute_force_compound: power must be >= 0");

  const Eigen::VectorXd s = m.diagonal().cwiseSqrt();
  Eigen::VectorXd lo(d);
  std::vector<long> counts(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    lo(i) = std::max(0.0, s(i) - radius);
    counts[i] = static_cast<long>(std::floor((s(i) + radius - lo(i)) / grid_step + 1e-9)) + 1;
  }

  const bool maximize = kind == CompoundKind::rdf;
  double best = maximize ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  std::vector<long> k(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd u(d), spectrum(d);
  const double r2 = radius * radius;
  while (true) {
    for (Eigen::Index i = 0; i < d; ++i) u(i) = lo(i) + static_cast<double>(k[i]) * grid_step;
    if (radius == 0.0) u = s;
    if ((u - s).squaredNorm() <= r2) {
      if (maximize) {
        spectrum = u.cwiseAbs2();
        best = std::max(best, reverse_waterfill_spectrum<double>(spectrum, budget).rate_nats);
      } else if ((u.array() > 0.0).all()) {
        spectrum = u.cwiseAbs2().cwiseInverse();
        best = std::min(best, waterfill_powers<double>(spectrum, budget).rate_nats);
      }
    }
    Eigen::Index axis = 0;
    while (axis < d && ++k[axis] == counts[axis]) k[axis++] = 0;
    if (axis == d) break;
  }
  return best;
}

}  // namespace robust_shannon
