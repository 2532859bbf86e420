// End-to-end acceptance suite: one PASS/FAIL line per check, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gelbrich_pairs.hpp"
#include "random_instances.hpp"
#include "robust_shannon/cli.hpp"
#include "robust_shannon/compound.hpp"
#include "robust_shannon/oracle.hpp"
#include "robust_shannon/sweep.hpp"

using namespace robust_shannon;

namespace {

struct Check {
  bool ok = true;
  double worst = 0.0;  // largest observed error, for the report line
  std::string note;

  void within(double error, double tolerance) {
    worst = std::max(worst, error);
    if (!(error <= tolerance)) ok = false;
  }
  void require(bool condition, const std::string& why) {
    if (!condition && ok) note = why;
    ok = ok && condition;
  }
};

int failures = 0;

void run_check(const char* name, double time_limit_s, const std::function<Check()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c.ok = false;
    c.note = std::string("exception: ") + e.what();
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = time_limit_s <= 0.0 || elapsed < time_limit_s;
  const bool pass = c.ok && in_time;
  if (!pass) ++failures;
  std::printf("%s %s max_error=%.3g time=%.2fs%s%s%s\n", pass ? "PASS" : "FAIL", name, c.worst, elapsed,
              in_time ? "" : " (over time limit)", c.note.empty() ? "" : " ", c.note.c_str());
  std::fflush(stdout);
}

std::vector<double> radius_grid() {
  std::vector<double> r;
  for (int k = 0; k <= 20; ++k) r.push_back(0.1 * k);
  return r;
}

std::string invoke(const std::vector<std::string>& args, int& code) {
  std::vector<const char*> argv = {"robust_shannon"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str();
}

}  // namespace

int main() {
  run_check("scalar-compound-rdf", 10.0, [] {
    Check c;
    for (double sigma0 : {0.5, 1.0, 2.0})
      for (double r : radius_grid())
        for (double dist : {0.01, 0.1, 0.5, 1.0, 2.0, 4.0}) {
          const long double w = (static_cast<long double>(sigma0) + r) * (static_cast<long double>(sigma0) + r);
          const double exact = w > dist ? static_cast<double>(0.5L * std::log(w / dist)) : 0.0;
          c.within(std::abs(compound_rdf_scalar(sigma0, r, dist) - exact), 1e-12);
          const CompoundResult res =
              compound_rdf(CompoundRdfRequest(BwBalld(SpdMatrixd::scalar(sigma0 * sigma0), r), dist));
          c.within(std::abs(res.value_nats - exact), 1e-6);
        }
    return c;
  });

  run_check("scalar-compound-capacity", 10.0, [] {
    Check c;
    for (double sigma0 : {0.5, 1.0, 2.0})
      for (double r : radius_grid())
        for (double power : {0.0, 0.5, 1.0, 3.0, 10.0}) {
          const long double w = (static_cast<long double>(sigma0) + r) * (static_cast<long double>(sigma0) + r);
          const double exact = static_cast<double>(0.5L * std::log1p(power / w));
          c.within(std::abs(compound_capacity_scalar(sigma0, r, power) - exact), 1e-12);
          const CompoundResult res = compound_capacity(CompoundCapacityRequest(
              BwBalld(SpdMatrixd::scalar(sigma0 * sigma0), r), ChannelMatrixd::identity(1), power));
          c.within(std::abs(res.value_nats - exact), 1e-6);
        }
    return c;
  });

  run_check("zero-radius-reduction", 0.0, [] {
    Check c;
    Rng rng(1001);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index d = 1 + trial % 5;
      const SpdMatrixd center = testing::random_spd(d, rng);
      const ChannelMatrixd h = trial % 2 == 0 ? ChannelMatrixd::identity(d)
                                              : ChannelMatrixd(testing::random_gaussian_matrix(d, d, rng));
      const double dist = center.trace() * (0.05 + 0.9 * rng.uniform());
      const double power = 5.0 * rng.uniform();
      const CompoundResult a = compound_rdf(CompoundRdfRequest(BwBalld(center, 0.0), dist));
      c.within(std::abs(a.value_nats - gaussian_rdf(center, dist)), 1e-8);
      const CompoundResult b = compound_capacity(CompoundCapacityRequest(BwBalld(center, 0.0), h, power));
      c.within(std::abs(b.value_nats - gaussian_capacity(h, center, power).rate_nats), 1e-8);
    }
    return c;
  });

  run_check("scalar-capacity-curve-family", 5.0, [] {
    Check c;
    const std::vector<double> radii = {0.0, 0.5, 1.0, 2.0};
    std::vector<SweepPoint> grid;
    for (double r : radii)
      for (int k = 0; k <= 100; ++k) grid.push_back({r, 10.0 * k / 100.0});
    const CompoundCapacityRequest base(BwBalld(SpdMatrixd::scalar(1.0), 0.0), ChannelMatrixd::identity(1), 1.0);
    const std::vector<SweepRow> rows = sweep_compound(base, grid);
    c.require(rows.size() == 404, "row count");
    for (std::size_t i = 0; i < radii.size(); ++i) {
      for (int k = 0; k <= 100; ++k) {
        const SweepRow& row = rows[i * 101 + static_cast<std::size_t>(k)];
        c.within(std::abs(row.value_nats - 0.5 * std::log1p(row.budget / ((1.0 + row.radius) * (1.0 + row.radius)))), 1e-9);
        if (k >= 1 && k < 100) c.require(rows[i * 101 + k + 1].value_nats > row.value_nats, "not increasing in B");
        if (k >= 1 && i + 1 < radii.size()) c.require(rows[(i + 1) * 101 + k].value_nats < row.value_nats, "not decreasing in r");
      }
    }
    return c;
  });

  run_check("dominance-over-ball-samples", 60.0, [] {
    Check c;
    Rng rng(1005);
    for (int instance = 0; instance < 10; ++instance) {
      const Eigen::Index d = 2 + instance % 2;
      const SpdMatrixd center = testing::random_spd(d, rng);
      const ChannelMatrixd h = instance % 2 == 0 ? ChannelMatrixd::identity(d)
                                                 : ChannelMatrixd(testing::random_gaussian_matrix(d, d, rng));
      const BwBalld ball(center, 0.1 + 0.9 * rng.uniform());
      const double dist = center.trace() * (0.1 + 0.6 * rng.uniform());
      const double power = 0.5 + 4.0 * rng.uniform();
      const double worst_rdf = compound_rdf(CompoundRdfRequest(ball, dist)).value_nats;
      const double worst_cap = compound_capacity(CompoundCapacityRequest(ball, h, power)).value_nats;
      for (std::uint64_t k = 0; k < 1000; ++k) {
        const SpdMatrixd draw = random_psd_in_ball(ball, mix_seed(1005 + instance, k));
        c.within(std::max(0.0, gaussian_rdf(draw, dist) - worst_rdf), 1e-6);
        c.within(std::max(0.0, worst_cap - gaussian_capacity(h, draw, power).rate_nats), 1e-6);
      }
    }
    return c;
  });

  run_check("grid-oracle-agreement", 120.0, [] {
    Check c;
    struct Instance {
      double a, b, r, dist, power;
    };
    for (const Instance& in : {Instance{1.0, 4.0, 0.5, 1.0, 2.0}, Instance{0.5, 2.0, 0.3, 0.4, 1.0},
                               Instance{3.0, 1.0, 0.8, 1.5, 4.0}}) {
      const SpdMatrixd center = SpdMatrixd::diagonal(Eigen::Vector2d(in.a, in.b));
      const BwBalld ball(center, in.r);
      const double rdf = compound_rdf(CompoundRdfRequest(ball, in.dist)).value_nats;
      const double cap = compound_capacity(CompoundCapacityRequest(ball, ChannelMatrixd::identity(2), in.power)).value_nats;
      c.within(std::abs(rdf - brute_force_compound(CompoundKind::rdf, center, in.r, in.dist, 1e-3)), 1e-3);
      c.within(std::abs(cap - brute_force_compound(CompoundKind::capacity, center, in.r, in.power, 1e-3)), 1e-3);
    }
    return c;
  });

  run_check("gelbrich-bound-on-samples", 60.0, [] {
    Check c;
    for (int k = 0; k < 10; ++k) {
      const auto [p, q] = gelbrich_pair(k);
      std::vector<double> empirical;
      double closed = 0.0;
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const GelbrichReport rep = check_gelbrich(p, q, 512, seed);
        closed = rep.gelbrich_closed_form;
        empirical.push_back(rep.empirical);
        c.require(rep.empirical >= 0.85 * rep.gelbrich_closed_form, "empirical below 0.85 x closed form");
      }
      std::sort(empirical.begin(), empirical.end());
      const double median = 0.5 * (empirical[9] + empirical[10]);
      c.within(std::abs(median - closed) / closed, 0.15);
    }
    return c;
  });

  run_check("rdf-test-channel-realization", 0.0, [] {
    Check c;
    Rng rng(1008);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::Index d = 1 + trial % 5;
      const SpdMatrixd cov = testing::random_spd(d, rng);
      const double dist = cov.trace() * (0.02 + 0.96 * rng.uniform());
      const TestChannel<double> ch = rdf_realization(cov, dist);
      const Eigen::MatrixXd residual = Eigen::MatrixXd::Identity(d, d) - ch.gain;
      const double mse = (residual * cov.matrix() * residual.transpose()).trace() + ch.noise_cov.trace();
      c.within(std::abs(mse - dist), 1e-9);
      c.within(std::abs(gaussian_mi(ch.gain, cov, ch.noise_cov) - gaussian_rdf(cov, dist)), 1e-9);
    }
    return c;
  });

  run_check("waterfill-budget-conservation", 0.0, [] {
    Check c;
    Rng rng(1009);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::Index d = 1 + trial % 6;
      const SpdMatrixd cov = testing::random_spd(d, rng);
      const double dist = cov.trace() * 1.5 * rng.uniform() + 1e-3;
      const double target = std::min(dist, cov.trace());
      c.within(std::abs(reverse_waterfill(cov, dist).per_mode.sum() - target) / target, 1e-9);
      Eigen::VectorXd gains(d);
      for (Eigen::Index i = 0; i < d; ++i) gains(i) = 0.01 + 5.0 * rng.uniform();
      const double power = 0.01 + 10.0 * rng.uniform();
      c.within(std::abs(waterfill_powers<double>(gains, power).per_mode.sum() - power) / power, 1e-9);
    }
    return c;
  });

  run_check("cli-byte-determinism", 0.0, [] {
    Check c;
    const std::vector<std::vector<std::string>> commands = {
        {"sweep", "--kind", "capacity", "--sigma0-scalar", "1", "--radii", "0,0.5,1,2", "--power", "0:10:101"},
        {"sweep", "--kind", "rdf", "--sigma0-scalar", "2", "--radii", "0:1:5", "--distortion", "0.1,1,4", "--output", "json"},
        {"compound-capacity", "--sigma0-scalar", "1", "--radius", "0.5", "--power", "2", "--units", "bits"},
        {"verify", "--suite", "all", "--seed", "7"}};
    for (const auto& cmd : commands) {
      int first = 0, second = 0;
      const std::string a = invoke(cmd, first), b = invoke(cmd, second);
      c.require(first == 0 && second == 0, "nonzero exit from " + cmd.front());
      c.require(a == b && !a.empty(), "output differs for " + cmd.front());
    }
    return c;
  });

  std::printf("%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
