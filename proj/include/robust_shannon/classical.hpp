#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "robust_shannon/bures_wasserstein.hpp"
#include "robust_shannon/errors.hpp"
#include "robust_shannon/spd_matrix.hpp"
#include "robust_shannon/waterfilling.hpp"

namespace robust_shannon {

/// Fixed, known channel matrix H in Y = HX + Z.
template <typename Scalar>
class ChannelMatrix {
 public:
  using MatrixType = MatrixX<Scalar>;

  template <typename Derived>
  explicit ChannelMatrix(const Eigen::MatrixBase<Derived>& h) : h_(h) {
    if (h_.rows() != h_.cols() || h_.rows() == 0) throw DimensionMismatch("ChannelMatrix: must be square and non-empty");
    if (!h_.allFinite()) throw DomainError("ChannelMatrix: non-finite entry");
  }

  static ChannelMatrix identity(Eigen::Index d) { return ChannelMatrix(MatrixType::Identity(d, d)); }

  Eigen::Index dim() const { return h_.rows(); }
  const MatrixType& matrix() const { return h_; }

 private:
  MatrixType h_;
};

using ChannelMatrixd = ChannelMatrix<double>;

/// Forward test channel Xhat = A X + Z, Z ~ N(0, noise_cov).
template <typename Scalar>
struct TestChannel {
  MatrixX<Scalar> gain;
  SpdMatrix<Scalar> noise_cov;
};

template <typename Scalar>
struct CapacitySolution {
  Scalar rate_nats;
  SpdMatrix<Scalar> input_cov;
  WaterfillAllocation<Scalar> allocation;
};

template <typename Scalar>
WaterfillAllocation<Scalar> reverse_waterfill(const SpdMatrix<Scalar>& cov, Scalar distortion) {
  return reverse_waterfill_spectrum<Scalar>(cov.eigenvalues(), distortion);
}

/// Gaussian rate-distortion function in nats.
template <typename Scalar>
Scalar gaussian_rdf(const SpdMatrix<Scalar>& cov, Scalar distortion) {
  if (cov.dim() == 1) {
    if (!(distortion > Scalar(0)) || !std::isfinite(static_cast<double>(distortion))) {
      throw DomainError("gaussian_rdf: distortion must be positive and finite");
    }
    const Scalar variance = cov(0, 0);
    return variance > distortion ? Scalar(0.5) * std::log(variance / distortion) : Scalar(0);
  }
  return reverse_waterfill(cov, distortion).rate_nats;
}

/// Per-eigenmode test channel attaining the Gaussian RDF:
/// a_i = (1 - D_i/lambda_i)^+, z_i = D_i a_i in the eigenbasis of cov.
template <typename Scalar>
TestChannel<Scalar> rdf_realization(const SpdMatrix<Scalar>& cov, Scalar distortion) {
  const WaterfillAllocation<Scalar> alloc = reverse_waterfill(cov, distortion);
  const VectorX<Scalar>& lambda = cov.eigenvalues();
  const Eigen::Index d = cov.dim();
  VectorX<Scalar> a(d), z(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Scalar di = alloc.per_mode(i);
    a(i) = lambda(i) > di ? Scalar(1) - di / lambda(i) : Scalar(0);
    z(i) = di * a(i);
  }
  const MatrixX<Scalar>& v = cov.eigenvectors();
  MatrixX<Scalar> gain = v * a.asDiagonal() * v.transpose();
  gain = (gain + gain.transpose()) * Scalar(0.5);
  return {gain, SpdMatrix<Scalar>::from_spectrum(z, v)};
}

/// I(X; AX + Z) = 1/2 log(|A S A^T + N| / |N|) for X ~ N(0, S), Z ~ N(0, N).
///
/// Singular N is handled on its range (pseudo-determinants) provided the
/// signal A S A^T vanishes on the null space of N; otherwise DegenerateMI.
template <typename Scalar>
Scalar gaussian_mi(const MatrixX<Scalar>& gain, const SpdMatrix<Scalar>& input_cov,
                   const SpdMatrix<Scalar>& noise_cov) {
  const Eigen::Index d = noise_cov.dim();
  if (gain.rows() != d || gain.cols() != input_cov.dim()) throw DimensionMismatch("gaussian_mi: dimension mismatch");

  MatrixX<Scalar> signal = gain * input_cov.matrix() * gain.transpose();
  signal = (signal + signal.transpose()) * Scalar(0.5);
  const Scalar signal_scale = signal.cwiseAbs().maxCoeff();
  const Scalar scale = std::max(noise_cov.eigenvalues()(0), signal_scale);
  if (scale == Scalar(0)) return Scalar(0);

  const Scalar zero_tol = Scalar(1e-12) * scale;
  Eigen::Index rank = 0;
  while (rank < d && noise_cov.eigenvalues()(rank) > zero_tol) ++rank;

  const MatrixX<Scalar>& v = noise_cov.eigenvectors();
  if (rank < d) {
    const MatrixX<Scalar> null_basis = v.rightCols(d - rank);
    const MatrixX<Scalar> leak = null_basis.transpose() * signal * null_basis;
    if (leak.cwiseAbs().maxCoeff() > Scalar(1e-9) * scale) {
      throw DegenerateMI("gaussian_mi: signal has energy on the null space of the noise covariance");
    }
  }
  if (rank == 0) return Scalar(0);

  const MatrixX<Scalar> range = v.leftCols(rank);
  const MatrixX<Scalar> output = range.transpose() * (signal + noise_cov.matrix()) * range;
  Eigen::LLT<MatrixX<Scalar>> llt(output);
  if (llt.info() != Eigen::Success) throw DegenerateMI("gaussian_mi: output covariance not positive definite");
  Scalar log_det_output(0);
  for (Eigen::Index i = 0; i < rank; ++i) log_det_output += Scalar(2) * std::log(llt.matrixL()(i, i));
  Scalar log_det_noise(0);
  for (Eigen::Index i = 0; i < rank; ++i) log_det_noise += std::log(noise_cov.eigenvalues()(i));
  return std::max(Scalar(0), Scalar(0.5) * (log_det_output - log_det_noise));
}

/// Capacity-cost of Y = HX + Z, Z ~ N(0, noise_cov), tr(input) <= B.
///
/// Whitens H~ = noise^-1/2 H and waterfills over the squared singular values
/// of H~. The optimal input covariance lives on the right singular vectors.
template <typename Scalar>
CapacitySolution<Scalar> gaussian_capacity(const ChannelMatrix<Scalar>& h, const SpdMatrix<Scalar>& noise_cov,
                                           Scalar power) {
  const Eigen::Index d = noise_cov.dim();
  if (h.dim() != d) throw DimensionMismatch("gaussian_capacity: channel/noise dimension mismatch");
  if (!(power >= Scalar(0)) || !std::isfinite(static_cast<double>(power))) {
    throw DomainError("gaussian_capacity: power must be finite and >= 0");
  }
  if (power == Scalar(0)) {
    WaterfillAllocation<Scalar> alloc;
    alloc.per_mode = VectorX<Scalar>::Zero(d);
    return {Scalar(0), SpdMatrix<Scalar>(MatrixX<Scalar>::Zero(d, d)), alloc};
  }
  const SpdMatrix<Scalar> noise = regularize_center(noise_cov).cov;
  const MatrixX<Scalar> whitened = pseudo_inverse_sqrt(noise) * h.matrix();

  Eigen::JacobiSVD<MatrixX<Scalar>> svd(whitened, Eigen::ComputeFullV);
  const VectorX<Scalar> gains = svd.singularValues().cwiseAbs2();
  WaterfillAllocation<Scalar> alloc = waterfill_powers<Scalar>(gains, power);
  SpdMatrix<Scalar> input = SpdMatrix<Scalar>::from_spectrum(alloc.per_mode, svd.matrixV());
  const Scalar rate = alloc.rate_nats;
  return {rate, std::move(input), std::move(alloc)};
}

}  // namespace robust_shannon
