#include "robust_shannon/compound.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "robust_shannon/bures_wasserstein.hpp"

namespace robust_shannon {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw DomainError(message);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

void validate(const SolverOptions& o) {
  require(o.max_iterations >= 1, "solver: max_iterations must be >= 1");
  require(o.relative_tolerance >= 0.0, "solver: relative_tolerance must be >= 0");
  require(o.stall_window >= 1, "solver: stall_window must be >= 1");
  require(o.armijo > 0.0 && o.armijo < 1.0, "solver: armijo constant must lie in (0, 1)");
  require(o.initial_step > 0.0, "solver: initial_step must be positive");
  require(o.max_backtracks >= 0, "solver: max_backtracks must be >= 0");
}

template <typename Gradient>
struct Evaluation {
  double value;
  Gradient gradient;
};

template <typename Point>
struct SearchOutcome {
  Point point;
  double value;
  int iterations;
  double step_norm;
  bool converged;
};

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a.array() * b.array()).sum(); }

// Projected gradient with Armijo backtracking, maximizing sense * value.
// The trial step doubles after each accepted step and halves on rejection.
// Stops once the value stalls (relative change <= tol) for stall_window
// consecutive iterations; kinks in the objective rule out a gradient test.
template <typename Point, typename Eval, typename Step, typename Displacement>
SearchOutcome<Point> projected_search(Point start, double sense, Eval&& eval, Step&& step,
                                      Displacement&& displacement, const SolverOptions& opt) {
  Point x = std::move(start);
  auto ex = eval(x);
  double alpha = opt.initial_step;
  int stall = 0;
  double step_norm = 0.0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const Eigen::MatrixXd dir = sense * ex.gradient;
    std::optional<Point> accepted;
    std::optional<decltype(ex)> accepted_eval;
    double a = alpha;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt, a *= 0.5) {
      Point cand = step(x, dir, a);
      auto ec = eval(cand);
      if (!std::isfinite(ec.value)) continue;
      const double gain = sense * (ec.value - ex.value);
      const double predicted = inner(dir, displacement(cand, x));
      if (gain >= 0.0 && gain >= opt.armijo * predicted) {
        accepted = std::move(cand);
        accepted_eval = std::move(ec);
        break;
      }
    }

    double change = 0.0;
    const double previous = ex.value;
    if (accepted) {
      step_norm = displacement(*accepted, x).norm();
      change = std::abs(accepted_eval->value - previous);
      x = std::move(*accepted);
      ex = std::move(*accepted_eval);
      alpha = std::min(2.0 * a, 1e12);
    } else {
      step_norm = 0.0;
      alpha = opt.initial_step;
    }

    stall = change <= opt.relative_tolerance * std::abs(previous) ? stall + 1 : 0;
    if (stall >= opt.stall_window) return {std::move(x), ex.value, it, step_norm, true};
  }
  return {std::move(x), ex.value, opt.max_iterations, step_norm, false};
}

// Clamp at zero, then pull back into ||u - s|| <= r.
Eigen::VectorXd retract_to_ball(const Eigen::VectorXd& u, const Eigen::VectorXd& s, double r) {
  Eigen::VectorXd y = u.cwiseMax(0.0);
  const Eigen::VectorXd diff = y - s;
  const double n = diff.norm();
  if (n > r) y = s + diff * (r / n);
  return y;
}

Eigen::MatrixXd difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a - b; }

SearchOutcome<Eigen::VectorXd> spectral_search(const std::vector<Eigen::VectorXd>& starts, double sense,
                                               const Eigen::VectorXd& s, double r,
                                               const std::function<Evaluation<Eigen::MatrixXd>(const Eigen::VectorXd&)>& eval,
                                               const SolverOptions& opt) {
  auto step = [&](const Eigen::VectorXd& u, const Eigen::MatrixXd& dir, double a) {
    return retract_to_ball(u + a * Eigen::VectorXd(dir), s, r);
  };
  std::optional<SearchOutcome<Eigen::VectorXd>> best;
  int total_iterations = 0;
  for (const Eigen::VectorXd& start : starts) {
    auto outcome = projected_search<Eigen::VectorXd>(retract_to_ball(start, s, r), sense, eval, step,
                                                     difference, opt);
    total_iterations += outcome.iterations;
    if (!best || sense * outcome.value > sense * best->value) best = std::move(outcome);
  }
  best->iterations = total_iterations;
  return *best;
}

SpdMatrixd commuting_matrix(const Eigen::VectorXd& root_spectrum, const Eigen::MatrixXd& basis) {
  return SpdMatrixd::from_spectrum(root_spectrum.cwiseAbs2(), basis);
}

}  // namespace

const char* to_string(SolverPath path) {
  switch (path) {
    case SolverPath::eigen_reduction:
      return "eigen-reduction";
    case SolverPath::projected_gradient:
      return "projected-gradient";
  }
  return "unknown";
}

CompoundRdfRequest::CompoundRdfRequest(BwBalld ball_in, double distortion_in)
    : ball(std::move(ball_in)), distortion(distortion_in) {
  require(distortion > 0.0 && std::isfinite(distortion), "compound RDF: distortion must be positive and finite");
}

CompoundCapacityRequest::CompoundCapacityRequest(BwBalld ball_in, ChannelMatrixd channel_in, double power_in)
    : ball(std::move(ball_in)), channel(std::move(channel_in)), power(power_in) {
  require(finite_nonneg(power), "compound capacity: power must be finite and >= 0");
  if (channel.dim() != ball.dim()) throw DimensionMismatch("compound capacity: channel/center dimension mismatch");
}

double compound_rdf_scalar(double sigma0, double radius, double distortion) {
  require(sigma0 > 0.0 && std::isfinite(sigma0), "compound_rdf_scalar: sigma0 must be positive");
  require(finite_nonneg(radius), "compound_rdf_scalar: radius must be >= 0");
  require(distortion > 0.0 && std::isfinite(distortion), "compound_rdf_scalar: distortion must be positive");
  const double worst = (sigma0 + radius) * (sigma0 + radius);
  return worst > distortion ? 0.5 * std::log(worst / distortion) : 0.0;
}

double compound_capacity_scalar(double sigma0, double radius, double power) {
  require(sigma0 > 0.0 && std::isfinite(sigma0), "compound_capacity_scalar: sigma0 must be positive");
  require(finite_nonneg(radius), "compound_capacity_scalar: radius must be >= 0");
  require(finite_nonneg(power), "compound_capacity_scalar: power must be >= 0");
  const double worst = (sigma0 + radius) * (sigma0 + radius);
  return 0.5 * std::log1p(power / worst);
}

CompoundResult compound_rdf(const CompoundRdfRequest& request, const SolverOptions& options) {
  validate(options);
  const SpdMatrixd& center = request.ball.center;
  const double r = request.ball.radius;
  const double budget = request.distortion;

  CompoundResult result;
  result.diagnostics.solver_path = SolverPath::eigen_reduction;
  if (r == 0.0) {
    result.worst_case_cov = center;
    result.inner_allocation = reverse_waterfill(center, budget);
    result.value_nats = gaussian_rdf(center, budget);
    result.diagnostics.converged = true;
    return result;
  }

  const Eigen::Index d = center.dim();
  const Eigen::VectorXd s = center.eigenvalues().cwiseSqrt();
  const Eigen::MatrixXd& basis = center.eigenvectors();

  auto eval = [budget](const Eigen::VectorXd& u) {
    const Eigen::VectorXd lambda = u.cwiseAbs2();
    const WaterfillAllocationd alloc = reverse_waterfill_spectrum<double>(lambda, budget);
    Eigen::MatrixXd grad = Eigen::VectorXd::Zero(u.size());
    // dR/dlambda_i = 1 / (2 max(lambda_i, theta)) below the zero-rate threshold.
    if (budget < lambda.sum()) {
      for (Eigen::Index i = 0; i < u.size(); ++i) grad(i) = u(i) / std::max(lambda(i), alloc.level);
    }
    return Evaluation<Eigen::MatrixXd>{alloc.rate_nats, grad};
  };

  // Radial inflation (the max-trace point) first; axis pushes catch maxima
  // that favour a single mode.
  std::vector<Eigen::VectorXd> starts;
  const double s_norm = s.norm();
  starts.push_back(s_norm > 0.0 ? Eigen::VectorXd(s + r * s / s_norm)
                                : Eigen::VectorXd(Eigen::VectorXd::Constant(d, r / std::sqrt(double(d)))));
  if (d > 1) {
    for (Eigen::Index i = 0; i < d; ++i) starts.push_back(s + r * Eigen::VectorXd::Unit(d, i));
  }

  const auto outcome = spectral_search(starts, 1.0, s, r, eval, options);
  result.worst_case_cov = commuting_matrix(outcome.point, basis);
  result.inner_allocation = reverse_waterfill(result.worst_case_cov, budget);
  result.value_nats = gaussian_rdf(result.worst_case_cov, budget);
  result.diagnostics.iterations = outcome.iterations;
  result.diagnostics.final_step_norm = outcome.step_norm;
  result.diagnostics.converged = outcome.converged;
  if (!outcome.converged) throw SolverNoConverge("compound_rdf: iteration cap reached", result);
  return result;
}

namespace {

// Diagonal of V^T H V when H is diagonal in the basis V (or a multiple of I).
std::optional<Eigen::VectorXd> commuting_channel_gains(const ChannelMatrixd& channel, const Eigen::MatrixXd& basis) {
  const Eigen::MatrixXd& h = channel.matrix();
  const Eigen::Index d = h.rows();
  const double h_norm = h.norm();
  const double c = h.trace() / static_cast<double>(d);
  if ((h - c * Eigen::MatrixXd::Identity(d, d)).norm() <= 1e-12 * h_norm) return Eigen::VectorXd::Constant(d, c);
  const Eigen::MatrixXd rotated = basis.transpose() * h * basis;
  const Eigen::VectorXd diag = rotated.diagonal();
  if ((rotated - Eigen::MatrixXd(diag.asDiagonal())).norm() <= 1e-10 * h_norm) return diag;
  return std::nullopt;
}

}  // namespace

CompoundResult compound_capacity(const CompoundCapacityRequest& request, const SolverOptions& options) {
  validate(options);
  const double r = request.ball.radius;
  const double power = request.power;
  const ChannelMatrixd& channel = request.channel;

  CompoundResult result;
  if (r == 0.0) {
    const auto sol = gaussian_capacity(channel, request.ball.center, power);
    result.worst_case_cov = request.ball.center;
    result.inner_allocation = sol.allocation;
    result.value_nats = sol.rate_nats;
    result.diagnostics.converged = true;
    return result;
  }

  const RegularizedCenter<double> reg = regularize_center(request.ball.center);
  const SpdMatrixd& center = reg.cov;
  result.diagnostics.center_jitter = reg.jitter;
  const Eigen::Index d = center.dim();

  const std::optional<Eigen::VectorXd> h_diag =
      options.force_projected_gradient ? std::nullopt : commuting_channel_gains(channel, center.eigenvectors());

  if (h_diag) {
    result.diagnostics.solver_path = SolverPath::eigen_reduction;
    const Eigen::VectorXd s = center.eigenvalues().cwiseSqrt();
    const Eigen::VectorXd h2 = h_diag->cwiseAbs2();
    auto eval = [&](const Eigen::VectorXd& u) {
      Eigen::MatrixXd grad = Eigen::VectorXd::Zero(d);
      Eigen::VectorXd gains(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        if (h2(i) == 0.0) {
          gains(i) = 0.0;
        } else if (u(i) <= 0.0) {
          return Evaluation<Eigen::MatrixXd>{std::numeric_limits<double>::infinity(), grad};
        } else {
          gains(i) = h2(i) / (u(i) * u(i));
        }
      }
      const WaterfillAllocationd alloc = waterfill_powers<double>(gains, power);
      // dC/dg_i = P_i / (2 (1 + g_i P_i)) and dg_i/du_i = -2 g_i / u_i.
      for (Eigen::Index i = 0; i < d; ++i) {
        const double p = alloc.per_mode(i);
        if (p > 0.0) grad(i) = -p * gains(i) / (u(i) * (1.0 + gains(i) * p));
      }
      return Evaluation<Eigen::MatrixXd>{alloc.rate_nats, grad};
    };
    const auto outcome = spectral_search({s}, -1.0, s, r, eval, options);
    result.worst_case_cov = commuting_matrix(outcome.point, center.eigenvectors());
    result.diagnostics.iterations = outcome.iterations;
    result.diagnostics.final_step_norm = outcome.step_norm;
    result.diagnostics.converged = outcome.converged;
  } else {
    result.diagnostics.solver_path = SolverPath::projected_gradient;
    // Search over a square-root factor L with noise = L L^T. Since
    // BW(L L^T, center) = min over such factors of ||L - center^1/2||_F, the
    // ball is exactly the Frobenius ball around center^1/2 in L, where the
    // projection is a plain rescaling.
    const Eigen::MatrixXd root = matrix_sqrt(center).matrix();
    const Eigen::MatrixXd& h = channel.matrix();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);

    auto eval = [&](const Eigen::MatrixXd& factor) {
      const SpdMatrixd noise(factor * factor.transpose());
      if (!(noise.eigenvalues()(d - 1) > 0.0)) {
        return Evaluation<Eigen::MatrixXd>{std::numeric_limits<double>::infinity(), Eigen::MatrixXd::Zero(d, d)};
      }
      const auto sol = gaussian_capacity(channel, noise, power);
      const Eigen::MatrixXd output = noise.matrix() + h * sol.input_cov.matrix() * h.transpose();
      // Envelope gradient in the noise covariance, pulled back through L L^T.
      Eigen::MatrixXd grad = 0.5 * (Eigen::MatrixXd(output.llt().solve(id)) - Eigen::MatrixXd(noise.matrix().llt().solve(id)));
      grad = (grad + grad.transpose()) * 0.5;
      return Evaluation<Eigen::MatrixXd>{sol.rate_nats, Eigen::MatrixXd(2.0 * grad * factor)};
    };
    auto step = [&](const Eigen::MatrixXd& factor, const Eigen::MatrixXd& dir, double a) {
      Eigen::MatrixXd moved = factor + a * dir;
      const double n = (moved - root).norm();
      if (n > r) moved = root + (moved - root) * (r / n);
      return moved;
    };
    auto outcome = projected_search<Eigen::MatrixXd>(root, -1.0, eval, step, difference, options);
    const Eigen::MatrixXd& factor = outcome.point;
    result.worst_case_cov = bw_ball_project(BwBalld(center, r), SpdMatrixd(factor * factor.transpose()));
    result.diagnostics.iterations = outcome.iterations;
    result.diagnostics.final_step_norm = outcome.step_norm;
    result.diagnostics.converged = outcome.converged;
  }

  const auto sol = gaussian_capacity(channel, result.worst_case_cov, power);
  result.inner_allocation = sol.allocation;
  result.value_nats = sol.rate_nats;
  if (!result.diagnostics.converged) throw SolverNoConverge("compound_capacity: iteration cap reached", result);
  return result;
}

}  // namespace robust_shannon
