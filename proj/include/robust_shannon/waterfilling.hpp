#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "robust_shannon/errors.hpp"
#include "robust_shannon/spd_matrix.hpp"

namespace robust_shannon {

/// Water level plus per-mode distortions (reverse waterfilling) or powers
/// (waterfilling), and the resulting rate in nats.
template <typename Scalar>
struct WaterfillAllocation {
  Scalar level = Scalar(0);
  VectorX<Scalar> per_mode;
  Scalar rate_nats = Scalar(0);
  int iterations = 0;  // bisection steps
};

using WaterfillAllocationd = WaterfillAllocation<double>;

namespace detail {

constexpr int kMaxBisection = 200;

// Bisection on a nondecreasing piecewise-linear excess(level) = allocated - budget,
// stopped at relative width 1e-12.
template <typename Scalar, typename Excess>
Scalar bisect_level(Scalar lo, Scalar hi, Excess&& excess, int& iterations) {
  iterations = 0;
  while (hi - lo > Scalar(1e-12) * hi) {
    if (++iterations > kMaxBisection) throw WaterfillNoConverge("water level bisection exceeded 200 iterations");
    const Scalar mid = Scalar(0.5) * (lo + hi);
    if (excess(mid) < Scalar(0)) lo = mid;
    else hi = mid;
  }
  return Scalar(0.5) * (lo + hi);
}

}  // namespace detail

/// Reverse waterfilling on a spectrum (any order): D_i = min(theta, lambda_i),
/// sum D_i = min(D, sum lambda_i).
template <typename Scalar>
WaterfillAllocation<Scalar> reverse_waterfill_spectrum(const VectorX<Scalar>& eigenvalues, Scalar distortion) {
  if (!(distortion > Scalar(0)) || !std::isfinite(static_cast<double>(distortion))) {
    throw DomainError("reverse waterfilling: distortion must be positive and finite");
  }
  const Eigen::Index d = eigenvalues.size();
  WaterfillAllocation<Scalar> out;
  const Scalar total = eigenvalues.sum();
  if (distortion >= total) {
    out.level = d > 0 ? eigenvalues.maxCoeff() : Scalar(0);
    out.per_mode = eigenvalues;
    return out;
  }

  Scalar min_positive = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < d; ++i)
    if (eigenvalues(i) > Scalar(0)) min_positive = std::min(min_positive, eigenvalues(i));

  auto excess = [&](Scalar theta) { return eigenvalues.cwiseMin(theta).sum() - distortion; };
  const Scalar rough =
      detail::bisect_level(min_positive * Scalar(1e-16), eigenvalues.maxCoeff(), excess, out.iterations);

  // Solve exactly on the active set identified by bisection.
  Eigen::Array<bool, Eigen::Dynamic, 1> active = eigenvalues.array() > rough;
  Scalar theta = rough;
  for (Eigen::Index pass = 0; pass <= d; ++pass) {
    Scalar inactive_sum(0);
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (active(i)) ++count;
      else inactive_sum += eigenvalues(i);
    }
    if (count == 0) break;
    theta = (distortion - inactive_sum) / static_cast<Scalar>(count);
    bool changed = false;
    for (Eigen::Index i = 0; i < d; ++i) {
      const bool should = eigenvalues(i) > theta;
      if (should != active(i)) {
        active(i) = should;
        changed = true;
      }
    }
    if (!changed) break;
  }

  out.level = theta;
  out.per_mode.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (active(i)) {
      out.per_mode(i) = theta;
      out.rate_nats += Scalar(0.5) * std::log(eigenvalues(i) / theta);
    } else {
      out.per_mode(i) = eigenvalues(i);
    }
  }
  return out;
}

/// Waterfilling over parallel gains: P_i = (nu - 1/g_i)^+, sum P_i = B.
/// Gains at or below 1e-14 * max gain carry no power.
template <typename Scalar>
WaterfillAllocation<Scalar> waterfill_powers(const VectorX<Scalar>& gains, Scalar power) {
  if (!(power >= Scalar(0)) || !std::isfinite(static_cast<double>(power))) {
    throw DomainError("waterfilling: power must be finite and >= 0");
  }
  const Eigen::Index d = gains.size();
  WaterfillAllocation<Scalar> out;
  out.per_mode = VectorX<Scalar>::Zero(d);
  const Scalar g_max = d > 0 ? gains.maxCoeff() : Scalar(0);
  if (!(g_max > Scalar(0))) return out;  // zero channel

  const Scalar cutoff = Scalar(1e-14) * g_max;
  VectorX<Scalar> inverse(d);
  Scalar min_inverse = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < d; ++i) {
    inverse(i) = gains(i) > cutoff ? Scalar(1) / gains(i) : std::numeric_limits<Scalar>::infinity();
    min_inverse = std::min(min_inverse, inverse(i));
  }
  if (power == Scalar(0)) {
    out.level = min_inverse;
    return out;
  }

  auto excess = [&](Scalar nu) { return (nu - inverse.array()).cwiseMax(Scalar(0)).sum() - power; };
  const Scalar rough = detail::bisect_level(min_inverse, min_inverse + power, excess, out.iterations);

  Eigen::Array<bool, Eigen::Dynamic, 1> active = inverse.array() < rough;
  Scalar nu = rough;
  for (Eigen::Index pass = 0; pass <= d; ++pass) {
    Scalar inverse_sum(0);
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (active(i)) {
        ++count;
        inverse_sum += inverse(i);
      }
    }
    if (count == 0) {
      // every inverse gain sits at the level; the strongest mode takes it all.
      Eigen::Index best = 0;
      inverse.minCoeff(&best);
      active(best) = true;
      continue;
    }
    nu = (power + inverse_sum) / static_cast<Scalar>(count);
    bool changed = false;
    for (Eigen::Index i = 0; i < d; ++i) {
      const bool should = inverse(i) < nu;
      if (should != active(i)) {
        active(i) = should;
        changed = true;
      }
    }
    if (!changed) break;
  }

  out.level = nu;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (active(i)) {
      out.per_mode(i) = nu - inverse(i);
      out.rate_nats += Scalar(0.5) * std::log1p(gains(i) * out.per_mode(i));
    }
  }
  return out;
}

}  // namespace robust_shannon
