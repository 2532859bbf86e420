#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "robust_shannon/errors.hpp"
#include "robust_shannon/random.hpp"
#include "robust_shannon/spd_matrix.hpp"

namespace robust_shannon {

namespace detail {

template <typename Scalar>
void require_same_dim(const SpdMatrix<Scalar>& a, const SpdMatrix<Scalar>& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()) + ")");
  }
}

template <typename Scalar>
MatrixX<Scalar> sqrt_of_symmetric(const MatrixX<Scalar>& m) {
  const MatrixX<Scalar> sym = (m + m.transpose()) * Scalar(0.5);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(sym);
  const VectorX<Scalar> roots = solver.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
  const MatrixX<Scalar> r = solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
  return (r + r.transpose()) * Scalar(0.5);
}

}  // namespace detail

/// BW(a, b) = (tr a + tr b - 2 tr (a^1/2 b a^1/2)^1/2)^1/2.
///
/// Evaluated as the Procrustes residual min_U ||a^1/2 - b^1/2 U||_F, with U
/// the polar factor of b^1/2 a^1/2. Same value, but without the cancellation
/// of the trace form when a and b are close.
template <typename Scalar>
Scalar bw_distance(const SpdMatrix<Scalar>& a, const SpdMatrix<Scalar>& b) {
  detail::require_same_dim(a, b, "bw_distance");
  const MatrixX<Scalar> root_a = matrix_sqrt(a).matrix();
  const MatrixX<Scalar> root_b = matrix_sqrt(b).matrix();
  const Eigen::JacobiSVD<MatrixX<Scalar>> svd(root_b * root_a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const MatrixX<Scalar> polar = svd.matrixU() * svd.matrixV().transpose();
  return (root_a - root_b * polar).norm();
}

/// W2 between Gaussians; Gelbrich's bound holds with equality here.
template <typename Scalar>
Scalar gaussian_w2(const GaussianLaw<Scalar>& p, const GaussianLaw<Scalar>& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("gaussian_w2: dimension mismatch");
  const Scalar bw = bw_distance(p.cov, q.cov);
  return std::sqrt(bw * bw + (p.mean - q.mean).squaredNorm());
}

template <typename Scalar>
struct RegularizedCenter {
  SpdMatrix<Scalar> cov;
  Scalar jitter;  // 0 when untouched
};

/// Adds eps*I with eps = 1e-12 tr(m)/d when the smallest eigenvalue falls below eps.
template <typename Scalar>
RegularizedCenter<Scalar> regularize_center(const SpdMatrix<Scalar>& m) {
  const Scalar eps = Scalar(1e-12) * m.trace() / static_cast<Scalar>(m.dim());
  if (!(eps > Scalar(0))) throw SingularCenter("center covariance is zero; cannot regularize");
  if (m.eigenvalues()(m.dim() - 1) >= eps) return {m, Scalar(0)};
  const VectorX<Scalar> shifted = m.eigenvalues().array() + eps;
  return {SpdMatrix<Scalar>::from_spectrum(shifted, m.eigenvectors()), eps};
}

/// Optimal transport map T with T from T = to between centered Gaussians.
template <typename Scalar>
MatrixX<Scalar> transport_map(const SpdMatrix<Scalar>& from, const SpdMatrix<Scalar>& to) {
  detail::require_same_dim(from, to, "transport_map");
  const SpdMatrix<Scalar> a = regularize_center(from).cov;
  const MatrixX<Scalar> root = matrix_sqrt(a).matrix();
  const MatrixX<Scalar> inv_root = pseudo_inverse_sqrt(a);
  const MatrixX<Scalar> middle = detail::sqrt_of_symmetric<Scalar>(root * to.matrix() * root);
  const MatrixX<Scalar> t = inv_root * middle * inv_root;
  return (t + t.transpose()) * Scalar(0.5);
}

/// Point at fraction t along the BW geodesic from center to target.
template <typename Scalar>
SpdMatrix<Scalar> bw_geodesic_point(const SpdMatrix<Scalar>& center, const SpdMatrix<Scalar>& target,
                                    Scalar t) {
  detail::require_same_dim(center, target, "bw_geodesic_point");
  if (!(t >= Scalar(0) && t <= Scalar(1))) throw DomainError("bw_geodesic_point: t must lie in [0, 1]");
  if (t == Scalar(0)) return center;
  if (t == Scalar(1)) return target;
  const SpdMatrix<Scalar> a = regularize_center(center).cov;
  const Eigen::Index d = center.dim();
  const MatrixX<Scalar> step =
      (Scalar(1) - t) * MatrixX<Scalar>::Identity(d, d) + t * transport_map(a, target);
  return SpdMatrix<Scalar>(step * a.matrix() * step);
}

/// Geodesic retraction onto the ball; points already inside are returned as-is.
template <typename Scalar>
SpdMatrix<Scalar> bw_ball_project(const BwBall<Scalar>& ball, const SpdMatrix<Scalar>& m) {
  const Scalar dist = bw_distance(ball.center, m);
  if (dist <= ball.radius) return m;
  return bw_geodesic_point(ball.center, m, ball.radius / dist);
}

/// Random covariance in the ball: geodesic from the center toward a random
/// PD target, stopped at distance t*radius with t ~ U[0, 1].
template <typename Scalar>
SpdMatrix<Scalar> random_psd_in_ball(const BwBall<Scalar>& ball, std::uint64_t seed) {
  if (ball.radius == Scalar(0)) return ball.center;
  const SpdMatrix<Scalar> a = regularize_center(ball.center).cov;
  const Eigen::Index d = a.dim();

  Rng rng(seed);
  MatrixX<Scalar> g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = static_cast<Scalar>(rng.normal());
  const MatrixX<Scalar> root = matrix_sqrt(a).matrix();
  MatrixX<Scalar> target = root * (g * g.transpose() / static_cast<Scalar>(d) +
                                   Scalar(1e-3) * MatrixX<Scalar>::Identity(d, d)) * root;

  // Inflate the target until it lies outside the ball so t*radius is reachable.
  SpdMatrix<Scalar> target_spd(target);
  Scalar dist = bw_distance(a, target_spd);
  for (int k = 0; k < 200 && dist <= ball.radius; ++k) {
    target *= Scalar(4);
    target_spd = SpdMatrix<Scalar>(target);
    dist = bw_distance(a, target_spd);
  }
  if (!(dist > ball.radius)) throw Error("random_psd_in_ball: could not place a target outside the ball");

  const Scalar t = static_cast<Scalar>(rng.uniform());
  return bw_geodesic_point(ball.center, target_spd, t * ball.radius / dist);
}

}  // namespace robust_shannon
