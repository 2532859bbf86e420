#include "robust_shannon/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <thread>

namespace robust_shannon {

namespace {

SweepRow make_row(const SweepPoint& p, const CompoundResult& r) {
  return {p.radius, p.budget, r.value_nats, r.worst_case_cov.trace(), r.diagnostics};
}

template <typename Solve>
std::vector<SweepRow> run_grid(const std::vector<SweepPoint>& grid, unsigned threads, Solve&& solve) {
  if (grid.empty()) throw DomainError("sweep: grid must be non-empty");
  const std::size_t n = grid.size();
  std::vector<std::optional<SweepRow>> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::string> messages(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = make_row(grid[i], solve(grid[i]));
      } catch (const std::exception& e) {
        errors[i] = std::current_exception();
        messages[i] = e.what();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) throw SweepPointError(i, messages[i], errors[i]);
  }
  std::vector<SweepRow> out;
  out.reserve(n);
  for (auto& row : rows) out.push_back(*row);
  return out;
}

}  // namespace

std::vector<SweepRow> sweep_compound(const CompoundRdfRequest& base, const std::vector<SweepPoint>& grid,
                                     const SweepOptions& options) {
  return run_grid(grid, options.threads, [&](const SweepPoint& p) {
    return compound_rdf(CompoundRdfRequest(BwBalld(base.ball.center, p.radius), p.budget), options.solver);
  });
}

std::vector<SweepRow> sweep_compound(const CompoundCapacityRequest& base, const std::vector<SweepPoint>& grid,
                                     const SweepOptions& options) {
  return run_grid(grid, options.threads, [&](const SweepPoint& p) {
    return compound_capacity(CompoundCapacityRequest(BwBalld(base.ball.center, p.radius), base.channel, p.budget),
                             options.solver);
  });
}

}  // namespace robust_shannon
