#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robust_shannon/errors.hpp"

namespace robust_shannon {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Dense symmetric positive semidefinite matrix.
///
/// Entries are symmetrized on construction and the spectrum is cached in
/// descending order. Round-off negatives down to -1e-10 * max(1, lambda_max)
/// are clamped to zero; anything more negative is rejected.
template <typename Scalar>
class SpdMatrix {
 public:
  using MatrixType = MatrixX<Scalar>;
  using VectorType = VectorX<Scalar>;

  static constexpr Scalar kPsdTolerance = Scalar(1e-10);

  SpdMatrix() = default;

  template <typename Derived>
  explicit SpdMatrix(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) {
      throw DimensionMismatch("SpdMatrix: matrix must be square, got " + std::to_string(m.rows()) +
                              "x" + std::to_string(m.cols()));
    }
    if (m.rows() == 0) throw DomainError("SpdMatrix: dimension must be positive");
    if (!m.allFinite()) throw DomainError("SpdMatrix: non-finite entry");

    // (a + b) * 0.5 == (b + a) * 0.5 bit-for-bit, so the result is exactly symmetric.
    matrix_ = (m + m.transpose()) * Scalar(0.5);

    Eigen::SelfAdjointEigenSolver<MatrixType> solver(matrix_);
    if (solver.info() != Eigen::Success) throw DomainError("SpdMatrix: eigendecomposition failed");
    const Eigen::Index d = matrix_.rows();
    values_ = solver.eigenvalues().reverse();
    vectors_ = solver.eigenvectors().rowwise().reverse();

    const Scalar floor = -kPsdTolerance * std::max(Scalar(1), values_(0));
    if (values_(d - 1) < floor) {
      throw DomainError("SpdMatrix: matrix is not positive semidefinite (min eigenvalue " +
                        std::to_string(static_cast<double>(values_(d - 1))) + ")");
    }
    if (values_(d - 1) < Scalar(0)) {
      values_ = values_.cwiseMax(Scalar(0));
      rebuild();
    }
  }

  /// Builds V diag(values) V^T. Columns of `vectors` must be orthonormal;
  /// values are clamped at zero and re-sorted descending.
  static SpdMatrix from_spectrum(const VectorType& values, const MatrixType& vectors) {
    if (vectors.rows() != vectors.cols() || vectors.cols() != values.size()) {
      throw DimensionMismatch("SpdMatrix::from_spectrum: inconsistent sizes");
    }
    if (values.size() == 0) throw DomainError("SpdMatrix: dimension must be positive");
    if (!values.allFinite()) throw DomainError("SpdMatrix::from_spectrum: non-finite eigenvalue");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });

    SpdMatrix out;
    out.values_.resize(values.size());
    out.vectors_.resize(vectors.rows(), vectors.cols());
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      out.values_(i) = std::max(Scalar(0), values(order[k]));
      out.vectors_.col(i) = vectors.col(order[k]);
    }
    out.rebuild();
    return out;
  }

  static SpdMatrix identity(Eigen::Index d) { return SpdMatrix(MatrixType::Identity(d, d)); }

  static SpdMatrix diagonal(const VectorType& diag) {
    return SpdMatrix(MatrixType(diag.asDiagonal()));
  }

  static SpdMatrix scalar(Scalar variance) {
    MatrixType m(1, 1);
    m(0, 0) = variance;
    return SpdMatrix(m);
  }

  Eigen::Index dim() const { return matrix_.rows(); }
  const MatrixType& matrix() const { return matrix_; }
  /// Descending, nonnegative.
  const VectorType& eigenvalues() const { return values_; }
  /// Orthonormal; column i pairs with eigenvalues()(i).
  const MatrixType& eigenvectors() const { return vectors_; }
  Scalar trace() const { return matrix_.trace(); }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return matrix_(i, j); }

 private:
  void rebuild() {
    const MatrixType m = vectors_ * values_.asDiagonal() * vectors_.transpose();
    matrix_ = (m + m.transpose()) * Scalar(0.5);
  }

  MatrixType matrix_;
  VectorType values_;
  MatrixType vectors_;
};

using SpdMatrixd = SpdMatrix<double>;

template <typename Scalar>
struct SymmetricEig {
  VectorX<Scalar> values;   // descending, >= 0
  MatrixX<Scalar> vectors;  // orthonormal columns
};

template <typename Scalar>
SymmetricEig<Scalar> symmetric_eig(const SpdMatrix<Scalar>& m) {
  return {m.eigenvalues(), m.eigenvectors()};
}

template <typename Scalar>
SpdMatrix<Scalar> matrix_sqrt(const SpdMatrix<Scalar>& m) {
  return SpdMatrix<Scalar>::from_spectrum(m.eigenvalues().cwiseSqrt(), m.eigenvectors());
}

/// Inverse square root; zero eigenvalues map to zero (pseudo-inverse root).
template <typename Scalar>
MatrixX<Scalar> pseudo_inverse_sqrt(const SpdMatrix<Scalar>& m) {
  VectorX<Scalar> inv = m.eigenvalues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    inv(i) = inv(i) > Scalar(0) ? Scalar(1) / std::sqrt(inv(i)) : Scalar(0);
  }
  const MatrixX<Scalar> r = m.eigenvectors() * inv.asDiagonal() * m.eigenvectors().transpose();
  return (r + r.transpose()) * Scalar(0.5);
}

/// Mean vector plus covariance.
template <typename Scalar>
struct GaussianLaw {
  GaussianLaw(VectorX<Scalar> mean_in, SpdMatrix<Scalar> cov_in)
      : mean(std::move(mean_in)), cov(std::move(cov_in)) {
    if (mean.size() != cov.dim()) throw DimensionMismatch("GaussianLaw: mean/cov dimension mismatch");
  }

  static GaussianLaw centered(SpdMatrix<Scalar> cov_in) {
    VectorX<Scalar> zero = VectorX<Scalar>::Zero(cov_in.dim());
    return GaussianLaw(std::move(zero), std::move(cov_in));
  }

  Eigen::Index dim() const { return mean.size(); }

  VectorX<Scalar> mean;
  SpdMatrix<Scalar> cov;
};

using GaussianLawd = GaussianLaw<double>;

/// Bures-Wasserstein ball {S : BW(S, center) <= radius}.
template <typename Scalar>
struct BwBall {
  BwBall(SpdMatrix<Scalar> center_in, Scalar radius_in)
      : center(std::move(center_in)), radius(radius_in) {
    if (!(radius >= Scalar(0)) || !std::isfinite(static_cast<double>(radius))) {
      throw DomainError("BwBall: radius must be finite and >= 0");
    }
  }

  Eigen::Index dim() const { return center.dim(); }

  SpdMatrix<Scalar> center;
  Scalar radius;
};

using BwBalld = BwBall<double>;

}  // namespace robust_shannon
