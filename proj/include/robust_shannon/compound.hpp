#pragma once

#include <string>

#include "robust_shannon/classical.hpp"
#include "robust_shannon/errors.hpp"
#include "robust_shannon/spd_matrix.hpp"
#include "robust_shannon/waterfilling.hpp"

namespace robust_shannon {

struct CompoundRdfRequest {
  CompoundRdfRequest(BwBalld ball_in, double distortion_in);

  BwBalld ball;
  double distortion;
};

struct CompoundCapacityRequest {
  CompoundCapacityRequest(BwBalld ball_in, ChannelMatrixd channel_in, double power_in);

  BwBalld ball;
  ChannelMatrixd channel;
  double power;
};

enum class SolverPath { eigen_reduction, projected_gradient };

const char* to_string(SolverPath path);

struct SolverDiagnostics {
  int iterations = 0;
  double final_step_norm = 0.0;
  bool converged = false;
  SolverPath solver_path = SolverPath::eigen_reduction;
  double center_jitter = 0.0;  // eps added to a singular center
};

struct CompoundResult {
  double value_nats = 0.0;
  SpdMatrixd worst_case_cov;  // source covariance (RDF) or noise covariance (capacity)
  WaterfillAllocationd inner_allocation;
  SolverDiagnostics diagnostics;
};

struct SolverOptions {
  int max_iterations = 10000;
  /// Converged once |dF| <= relative_tolerance * |F| for stall_window consecutive iterations.
  double relative_tolerance = 1e-10;
  int stall_window = 10;
  double armijo = 1e-4;
  double initial_step = 1.0;
  int max_backtracks = 60;
  /// Skip the spectral reduction for capacity (cross-checks only).
  bool force_projected_gradient = false;
};

class SolverNoConverge : public Error {
 public:
  SolverNoConverge(const std::string& what, CompoundResult partial)
      : Error(what), partial_(std::move(partial)) {}

  const CompoundResult& partial() const { return partial_; }

 private:
  CompoundResult partial_;
};

/// 1/2 log+((sigma0 + r)^2 / D).
double compound_rdf_scalar(double sigma0, double radius, double distortion);

/// 1/2 log(1 + B / (sigma0 + r)^2).
double compound_capacity_scalar(double sigma0, double radius, double power);

/// Worst-case Gaussian RDF over the BW ball around the source covariance.
///
/// The objective depends only on the spectrum, and for a fixed spectrum the
/// BW distance to the center is smallest for the matrix sharing the center's
/// eigenbasis with aligned order. The search therefore runs over
/// u = sqrt(eigenvalues) in the Euclidean ball ||u - s|| <= r around the
/// center's root spectrum s, by projected gradient ascent.
CompoundResult compound_rdf(const CompoundRdfRequest& request, const SolverOptions& options = {});

/// Worst-case Gaussian capacity over the BW ball around the noise covariance.
///
/// Channels that are a multiple of the identity, or diagonal in the center's
/// eigenbasis, use the same spectral reduction. Other channels run projected
/// gradient descent on the noise covariance with the envelope gradient
/// 1/2 ((N + H Q H^T)^-1 - N^-1), retracted onto the ball along geodesics.
CompoundResult compound_capacity(const CompoundCapacityRequest& request, const SolverOptions& options = {});

}  // namespace robust_shannon
