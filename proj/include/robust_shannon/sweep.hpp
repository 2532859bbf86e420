#pragma once

#include <cstddef>
#include <exception>
#include <string>
#include <vector>

#include "robust_shannon/compound.hpp"

namespace robust_shannon {

struct SweepPoint {
  double radius;
  double budget;  // distortion D or power B
};

struct SweepRow {
  double radius;
  double budget;
  double value_nats;
  double worst_case_trace;
  SolverDiagnostics diagnostics;
};

struct SweepOptions {
  /// 0 = hardware concurrency.
  unsigned threads = 1;
  SolverOptions solver;
};

/// Failure at one grid point; cause() holds the original exception.
class SweepPointError : public Error {
 public:
  SweepPointError(std::size_t index, const std::string& what, std::exception_ptr cause)
      : Error("grid point " + std::to_string(index) + ": " + what), index_(index), cause_(std::move(cause)) {}

  std::size_t index() const { return index_; }
  const std::exception_ptr& cause() const { return cause_; }

 private:
  std::size_t index_;
  std::exception_ptr cause_;
};

/// Evaluates compound_rdf at each (r, D), keeping the base request's center.
/// Rows come back in grid order whatever the thread count.
std::vector<SweepRow> sweep_compound(const CompoundRdfRequest& base, const std::vector<SweepPoint>& grid,
                                     const SweepOptions& options = {});

/// Evaluates compound_capacity at each (r, B), keeping center and channel.
std::vector<SweepRow> sweep_compound(const CompoundCapacityRequest& base, const std::vector<SweepPoint>& grid,
                                     const SweepOptions& options = {});

}  // namespace robust_shannon
