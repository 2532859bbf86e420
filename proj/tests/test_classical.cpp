#include <doctest.h>

#include <cmath>

#include "random_instances.hpp"
#include "robust_shannon/classical.hpp"

using namespace robust_shannon;

namespace {

SpdMatrixd diag2(double a, double b) { return SpdMatrixd::diagonal(Eigen::Vector2d(a, b)); }

}  // namespace

TEST_CASE("gaussian_rdf examples") {
  CHECK(gaussian_rdf(SpdMatrixd::scalar(1.0), 1.0) == 0.0);
  CHECK(gaussian_rdf(SpdMatrixd::scalar(4.0), 1.0) == doctest::Approx(0.5 * std::log(4.0)).epsilon(1e-15));
  CHECK(gaussian_rdf(diag2(1.0, 4.0), 2.0) == doctest::Approx(0.693147180559945).epsilon(1e-12));
  CHECK(gaussian_rdf(SpdMatrixd::scalar(2.0), 5.0) == 0.0);
  CHECK_THROWS_AS(gaussian_rdf(SpdMatrixd::scalar(1.0), 0.0), DomainError);
}

TEST_CASE("gaussian_rdf is rotation invariant, decreasing in D and scale covariant") {
  Rng rng(201);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const SpdMatrixd cov = testing::random_spd(d, rng);
    const double dist = 0.3 * cov.trace() * (0.1 + 0.8 * rng.uniform());
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(testing::random_gaussian_matrix(d, d, rng)).householderQ();
    const SpdMatrixd rotated(q * cov.matrix() * q.transpose());
    CHECK(gaussian_rdf(rotated, dist) == doctest::Approx(gaussian_rdf(cov, dist)).epsilon(1e-10));
    CHECK(gaussian_rdf(cov, dist * 1.1) <= gaussian_rdf(cov, dist) + 1e-14);
    const SpdMatrixd scaled(cov.matrix() * 3.0);
    CHECK(gaussian_rdf(scaled, 3.0 * dist) == doctest::Approx(gaussian_rdf(cov, dist)).epsilon(1e-10));
  }
}

TEST_CASE("rdf_realization examples") {
  const TestChannel<double> scalar = rdf_realization(SpdMatrixd::scalar(4.0), 1.0);
  CHECK(scalar.gain(0, 0) == doctest::Approx(0.75));
  CHECK(scalar.noise_cov(0, 0) == doctest::Approx(0.75));

  const TestChannel<double> two = rdf_realization(diag2(1.0, 4.0), 2.0);
  CHECK(two.gain(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(two.gain(1, 1) == doctest::Approx(0.75));
  CHECK(std::abs(two.gain(0, 1)) < 1e-12);
  CHECK(two.noise_cov(1, 1) == doctest::Approx(0.75));
}

TEST_CASE("rdf_realization attains the rate with the requested distortion") {
  Rng rng(203);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 1 + trial % 4;
    const SpdMatrixd cov = testing::random_spd(d, rng);
    const double dist = cov.trace() * (0.05 + 0.9 * rng.uniform());
    const TestChannel<double> ch = rdf_realization(cov, dist);
    const Eigen::MatrixXd& a = ch.gain;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
    // E||X - Xhat||^2 = tr((I - A) S (I - A)^T) + tr(N)
    const double mse = ((eye - a) * cov.matrix() * (eye - a).transpose()).trace() + ch.noise_cov.trace();
    CHECK(mse == doctest::Approx(dist).epsilon(1e-9));
    if (ch.noise_cov.eigenvalues().minCoeff() > 1e-9) {
      CHECK(gaussian_mi(a, cov, ch.noise_cov) == doctest::Approx(gaussian_rdf(cov, dist)).epsilon(1e-9));
    }
  }
}

TEST_CASE("gaussian_mi examples") {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  CHECK(gaussian_mi<double>(one, SpdMatrixd::scalar(3.0), SpdMatrixd::scalar(1.0)) ==
        doctest::Approx(0.5 * std::log(4.0)).epsilon(1e-15));
  CHECK(gaussian_mi<double>(Eigen::MatrixXd::Identity(2, 2), diag2(1.0, 2.0), SpdMatrixd::identity(2)) ==
        doctest::Approx(0.895879734614027).epsilon(1e-13));
  CHECK(gaussian_mi<double>(Eigen::MatrixXd::Zero(2, 2), diag2(1.0, 2.0), SpdMatrixd::identity(2)) == 0.0);
}

TEST_CASE("gaussian_mi on a singular noise covariance") {
  // signal confined to the range of the noise: pseudo-determinants
  const Eigen::MatrixXd a = Eigen::Vector2d(1.0, 0.0).asDiagonal();
  CHECK(gaussian_mi<double>(a, SpdMatrixd::identity(2), diag2(1.0, 0.0)) == doctest::Approx(0.5 * std::log(2.0)));
  CHECK_THROWS_AS(gaussian_mi<double>(Eigen::MatrixXd::Identity(2, 2), SpdMatrixd::identity(2), diag2(1.0, 0.0)),
                  DegenerateMI);
  CHECK_THROWS_AS(gaussian_mi<double>(Eigen::MatrixXd::Identity(3, 3), SpdMatrixd::identity(2), SpdMatrixd::identity(2)),
                  DimensionMismatch);
}

TEST_CASE("gaussian_capacity examples") {
  const auto none = gaussian_capacity(ChannelMatrixd::identity(2), SpdMatrixd::identity(2), 0.0);
  CHECK(none.rate_nats == 0.0);
  CHECK(none.input_cov.trace() == 0.0);

  const auto scalar = gaussian_capacity(ChannelMatrixd::identity(1), SpdMatrixd::scalar(1.0), 3.0);
  CHECK(scalar.rate_nats == doctest::Approx(0.5 * std::log(4.0)).epsilon(1e-14));

  const auto two = gaussian_capacity(ChannelMatrixd::identity(2), SpdMatrixd::identity(2), 2.0);
  CHECK(two.rate_nats == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(two.input_cov.matrix().isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-12));

  const auto dead = gaussian_capacity(ChannelMatrixd(Eigen::MatrixXd::Zero(2, 2)), SpdMatrixd::identity(2), 4.0);
  CHECK(dead.rate_nats == 0.0);

  CHECK_THROWS_AS(gaussian_capacity(ChannelMatrixd::identity(2), SpdMatrixd::identity(2), -1.0), DomainError);
  CHECK_THROWS_AS(gaussian_capacity(ChannelMatrixd::identity(3), SpdMatrixd::identity(2), 1.0), DimensionMismatch);
}

TEST_CASE("gaussian_capacity input is optimal and feasible") {
  Rng rng(207);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 1 + trial % 4;
    const ChannelMatrixd h(testing::random_gaussian_matrix(d, d, rng));
    const SpdMatrixd noise = testing::random_spd(d, rng);
    const double power = 0.1 + 5.0 * rng.uniform();
    const auto sol = gaussian_capacity(h, noise, power);
    CHECK(sol.input_cov.trace() == doctest::Approx(power).epsilon(1e-10));
    CHECK(gaussian_mi(h.matrix(), sol.input_cov, noise) == doctest::Approx(sol.rate_nats).epsilon(1e-9));
    // no random feasible input beats it
    for (int k = 0; k < 20; ++k) {
      const Eigen::MatrixXd g = testing::random_gaussian_matrix(d, d, rng);
      Eigen::MatrixXd s = g * g.transpose();
      s *= power / s.trace();
      CHECK(gaussian_mi(h.matrix(), SpdMatrixd(s), noise) <= sol.rate_nats + 1e-10);
    }
  }
}

TEST_CASE("gaussian_capacity is invariant under joint whitening") {
  // Y = HX + Z with noise N is equivalent to N^-1/2 Y with identity noise
  Rng rng(209);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const Eigen::MatrixXd h = testing::random_gaussian_matrix(d, d, rng);
    const SpdMatrixd noise = testing::random_spd(d, rng);
    const Eigen::MatrixXd white = pseudo_inverse_sqrt(noise) * h;
    CHECK(gaussian_capacity(ChannelMatrixd(h), noise, 2.0).rate_nats ==
          doctest::Approx(gaussian_capacity(ChannelMatrixd(white), SpdMatrixd::identity(d), 2.0).rate_nats).epsilon(1e-10));
  }
}
