#include "robust_shannon/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "robust_shannon/bures_wasserstein.hpp"
#include "robust_shannon/classical.hpp"
#include "robust_shannon/matrix_io.hpp"
#include "robust_shannon/random.hpp"
#include "robust_shannon/sweep.hpp"

namespace robust_shannon::cli {

namespace {

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(x)) throw ConfigError("invalid number '" + text + "'");
  return x;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

SpdMatrixd load_center(const RunConfig& c) {
  if (c.sigma0_scalar) {
    if (!(*c.sigma0_scalar > 0.0)) throw ConfigError("--sigma0-scalar must be positive");
    return SpdMatrixd::scalar(*c.sigma0_scalar * *c.sigma0_scalar);
  }
  if (c.center_path.empty()) throw ConfigError("one of --center or --sigma0-scalar is required");
  return load_spd_matrix(c.center_path);
}

ChannelMatrixd load_channel(const RunConfig& c, Eigen::Index d) {
  if (c.channel_path.empty()) return ChannelMatrixd::identity(d);
  ChannelMatrixd h(load_matrix(c.channel_path));
  if (h.dim() != d) throw ConfigError("channel dimension does not match the center");
  return h;
}

double single_budget(const RunConfig& c) {
  if (c.budgets.size() != 1) throw ConfigError("exactly one budget value is required (--distortion or --power)");
  return c.budgets.front();
}

ResultRow compound_row(double radius, double budget, const CompoundResult& r) {
  return {radius, budget, r.value_nats, r.worst_case_cov.trace(), r.diagnostics};
}

// --- verify suites ---------------------------------------------------------

struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

SpdMatrixd random_spd(Eigen::Index d, Rng& rng) {
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.normal();
  return SpdMatrixd(g * g.transpose() / static_cast<double>(d) + 0.2 * Eigen::MatrixXd::Identity(d, d));
}

void gelbrich_suite(std::uint64_t seed, std::vector<Check>& checks) {
  Rng rng(mix_seed(seed, 100));
  for (int k = 0; k < 3; ++k) {
    const Eigen::Index d = 1 + k;
    Eigen::VectorXd shift(d);
    for (Eigen::Index i = 0; i < d; ++i) shift(i) = rng.normal();
    shift *= 3.0 / shift.norm();
    const GaussianLawd p = GaussianLawd::centered(random_spd(d, rng));
    const GaussianLawd q(shift, random_spd(d, rng));
    const GelbrichReport rep = check_gelbrich(p, q, 256, mix_seed(seed, 200 + k));
    checks.push_back({"gelbrich[" + std::to_string(k) + "]", rep.lower_bound_ok,
                      "empirical=" + format_number(rep.empirical) +
                          " closed_form=" + format_number(rep.gelbrich_closed_form)});
  }
}

void dominance_suite(std::uint64_t seed, std::vector<Check>& checks) {
  Rng rng(mix_seed(seed, 300));
  const SpdMatrixd center = random_spd(2, rng);
  const double radius = 0.2 + 0.6 * rng.uniform();
  const double distortion = 0.1 + 0.5 * rng.uniform();
  const double power = 0.5 + 3.0 * rng.uniform();
  const BwBalld ball(center, radius);
  const CompoundResult rdf = compound_rdf(CompoundRdfRequest(ball, distortion));
  const CompoundResult cap = compound_capacity(CompoundCapacityRequest(ball, ChannelMatrixd::identity(2), power));
  double worst_rdf = -1.0, worst_cap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    const SpdMatrixd draw = random_psd_in_ball(ball, mix_seed(seed, 1000 + k));
    worst_rdf = std::max(worst_rdf, gaussian_rdf(draw, distortion));
    worst_cap = std::min(worst_cap, gaussian_capacity(ChannelMatrixd::identity(2), draw, power).rate_nats);
  }
  checks.push_back({"dominance[rdf]", worst_rdf <= rdf.value_nats + 1e-6,
                    "compound=" + format_number(rdf.value_nats) + " max_draw=" + format_number(worst_rdf)});
  checks.push_back({"dominance[capacity]", worst_cap >= cap.value_nats - 1e-6,
                    "compound=" + format_number(cap.value_nats) + " min_draw=" + format_number(worst_cap)});
}

void brute_force_suite(std::vector<Check>& checks) {
  const SpdMatrixd center = SpdMatrixd::diagonal(Eigen::Vector2d(1.0, 4.0));
  const BwBalld ball(center, 0.5);
  constexpr double step = 5e-3;
  const double rdf = compound_rdf(CompoundRdfRequest(ball, 1.0)).value_nats;
  const double rdf_grid = brute_force_compound(CompoundKind::rdf, center, 0.5, 1.0, step);
  const double cap = compound_capacity(CompoundCapacityRequest(ball, ChannelMatrixd::identity(2), 2.0)).value_nats;
  const double cap_grid = brute_force_compound(CompoundKind::capacity, center, 0.5, 2.0, step);
  checks.push_back({"bruteforce[rdf]", std::abs(rdf - rdf_grid) <= step,
                    "solver=" + format_number(rdf) + " grid=" + format_number(rdf_grid)});
  checks.push_back({"bruteforce[capacity]", std::abs(cap - cap_grid) <= step,
                    "solver=" + format_number(cap) + " grid=" + format_number(cap_grid)});
}

int run_verify(const RunConfig& c, std::ostream& out) {
  const std::string& suite = c.suite;
  if (suite != "all" && suite != "gelbrich" && suite != "dominance" && suite != "bruteforce") {
    throw ConfigError("unknown verify suite '" + suite + "' (gelbrich, dominance, bruteforce, all)");
  }
  std::vector<Check> checks;
  if (suite == "all" || suite == "gelbrich") gelbrich_suite(c.seed, checks);
  if (suite == "all" || suite == "dominance") dominance_suite(c.seed, checks);
  if (suite == "all" || suite == "bruteforce") brute_force_suite(checks);
  int passed = 0;
  for (const Check& check : checks) {
    out << (check.passed ? "PASS " : "FAIL ") << check.name << ' ' << check.detail << '\n';
    passed += check.passed ? 1 : 0;
  }
  out << "verify: " << passed << '/' << checks.size() << " checks passed\n";
  return passed == static_cast<int>(checks.size()) ? kExitOk : kExitCheckFailed;
}

std::vector<ResultRow> run_sweep(const RunConfig& c) {
  if (c.radii.empty()) throw ConfigError("sweep: --radii is required");
  if (c.budgets.empty()) throw ConfigError("sweep: a budget axis (--distortion or --power) is required");
  std::vector<SweepPoint> grid;
  grid.reserve(c.radii.size() * c.budgets.size());
  for (double r : c.radii)
    for (double b : c.budgets) grid.push_back({r, b});
  std::stable_sort(grid.begin(), grid.end(), [](const SweepPoint& a, const SweepPoint& b) {
    return a.radius != b.radius ? a.radius < b.radius : a.budget < b.budget;
  });

  const SpdMatrixd center = load_center(c);
  const SweepOptions options{c.threads, c.solver};
  std::vector<SweepRow> rows;
  if (c.kind == CompoundKind::rdf) {
    rows = sweep_compound(CompoundRdfRequest(BwBalld(center, grid[0].radius), grid[0].budget), grid, options);
  } else {
    const ChannelMatrixd h = load_channel(c, center.dim());
    rows = sweep_compound(CompoundCapacityRequest(BwBalld(center, grid[0].radius), h, grid[0].budget), grid,
                          options);
  }
  std::vector<ResultRow> out;
  out.reserve(rows.size());
  for (const SweepRow& r : rows) out.push_back({r.radius, r.budget, r.value_nats, r.worst_case_trace, r.diagnostics});
  return out;
}

std::vector<ResultRow> compute(const RunConfig& c) {
  switch (c.subcommand) {
    case Subcommand::rdf: {
      const SpdMatrixd cov = load_center(c);
      const double d = single_budget(c);
      return {{0.0, d, gaussian_rdf(cov, d), cov.trace(), std::nullopt}};
    }
    case Subcommand::capacity: {
      const SpdMatrixd noise = load_center(c);
      const double b = single_budget(c);
      const auto sol = gaussian_capacity(load_channel(c, noise.dim()), noise, b);
      return {{0.0, b, sol.rate_nats, noise.trace(), std::nullopt}};
    }
    case Subcommand::compound_rdf: {
      const double d = single_budget(c);
      const CompoundRdfRequest req(BwBalld(load_center(c), c.radius), d);
      return {compound_row(c.radius, d, compound_rdf(req, c.solver))};
    }
    case Subcommand::compound_capacity: {
      const double b = single_budget(c);
      const SpdMatrixd center = load_center(c);
      const CompoundCapacityRequest req(BwBalld(center, c.radius), load_channel(c, center.dim()), b);
      return {compound_row(c.radius, b, compound_capacity(req, c.solver))};
    }
    case Subcommand::sweep:
      return run_sweep(c);
    case Subcommand::verify:
      break;
  }
  return {};
}

void report_partial(const SolverNoConverge& e, std::ostream& err) {
  const SolverDiagnostics& d = e.partial().diagnostics;
  err << "error: " << e.what() << " (iterations=" << d.iterations
      << " final_step_norm=" << format_number(d.final_step_norm)
      << " value_nats=" << format_number(e.partial().value_nats) << " solver_path=" << to_string(d.solver_path)
      << ")\n";
}

int classify(std::exception_ptr ep, std::ostream& err, const std::string& prefix) {
  try {
    std::rethrow_exception(ep);
  } catch (const SweepPointError& e) {
    return classify(e.cause(), err, prefix + "grid point " + std::to_string(e.index()) + ": ");
  } catch (const SolverNoConverge& e) {
    err << prefix;
    report_partial(e, err);
    return kExitNoConverge;
  } catch (const WaterfillNoConverge& e) {
    err << "error: " << prefix << e.what() << '\n';
    return kExitNoConverge;
  } catch (const IoError& e) {
    err << "error: " << prefix << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << prefix << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace

std::vector<double> parse_axis(const std::string& spec) {
  if (spec.empty()) throw ConfigError("empty value list");
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw ConfigError("grid '" + spec + "' must be start:stop:count");
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const double count_d = parse_number(parts[2]);
    if (count_d < 1.0 || count_d != std::floor(count_d) || count_d > 1e7) {
      throw ConfigError("grid '" + spec + "': count must be a positive integer");
    }
    const auto count = static_cast<long>(count_d);
    std::vector<double> values(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
      values[static_cast<std::size_t>(i)] =
          count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    if (count > 1) values.back() = stop;
    return values;
  }
  std::vector<double> values;
  for (const std::string& part : split(spec, ',')) values.push_back(parse_number(part));
  return values;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  RunConfig config;
  CLI::App app{"Classical and Wasserstein-robust Gaussian rate-distortion and capacity", "robust_shannon"};
  app.require_subcommand(1, 1);

  std::string radii, distortion, power, kind = "rdf", units = "nats", output = "csv";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--center", config.center_path, "JSON matrix file with the (center) covariance");
    sub->add_option("--sigma0-scalar", config.sigma0_scalar, "scalar center standard deviation (d = 1)");
    sub->add_option("--units", units, "nats | bits")->check(CLI::IsMember({"nats", "bits"}));
    sub->add_option("--output", output, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", config.seed, "RNG seed");
    sub->add_option("--max-iterations", config.solver.max_iterations, "solver iteration cap");
    sub->add_option("--tolerance", config.solver.relative_tolerance, "relative value-stall tolerance");
  };

  struct Entry {
    const char* name;
    Subcommand sub;
    const char* help;
  };
  const Entry entries[] = {
      {"rdf", Subcommand::rdf, "Gaussian rate-distortion function"},
      {"capacity", Subcommand::capacity, "Gaussian channel capacity"},
      {"compound-rdf", Subcommand::compound_rdf, "worst-case RDF over a BW ball"},
      {"compound-capacity", Subcommand::compound_capacity, "worst-case capacity over a BW ball"},
      {"sweep", Subcommand::sweep, "compound RDF/capacity over a grid of radii and budgets"},
      {"verify", Subcommand::verify, "run verification oracles"},
  };
  std::vector<std::pair<CLI::App*, Subcommand>> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub);
    subs.emplace_back(sub, e.sub);
    if (e.sub == Subcommand::verify) {
      sub->add_option("--suite", config.suite, "gelbrich | dominance | bruteforce | all");
      continue;
    }
    if (e.sub != Subcommand::rdf && e.sub != Subcommand::compound_rdf) {
      sub->add_option("--channel", config.channel_path, "JSON channel matrix file (default identity)");
    }
    if (e.sub == Subcommand::compound_rdf || e.sub == Subcommand::compound_capacity) {
      sub->add_option("--radius", config.radius, "ambiguity radius r >= 0");
    }
    if (e.sub == Subcommand::sweep) {
      sub->add_option("--kind", kind, "rdf | capacity")->check(CLI::IsMember({"rdf", "capacity"}));
      sub->add_option("--radii", radii, "radii: list a,b,c or grid start:stop:count")->required();
      sub->add_option("--distortion", distortion, "distortion axis (kind rdf)");
      sub->add_option("--power", power, "power axis (kind capacity)");
    } else if (e.sub == Subcommand::rdf || e.sub == Subcommand::compound_rdf) {
      sub->add_option("--distortion", distortion, "distortion D > 0")->required();
    } else {
      sub->add_option("--power", power, "power budget B >= 0")->required();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [sub, id] : subs) {
    if (sub->parsed()) config.subcommand = id;
  }

  config.units = units == "bits" ? Units::bits : Units::nats;
  config.output = output == "json" ? OutputFormat::json : OutputFormat::csv;
  config.kind = kind == "capacity" ? CompoundKind::capacity : CompoundKind::rdf;
  if (config.subcommand == Subcommand::sweep) {
    config.radii = parse_axis(radii);
    const std::string& axis = config.kind == CompoundKind::rdf ? distortion : power;
    if (axis.empty()) {
      throw ConfigError(std::string("sweep: --") + (config.kind == CompoundKind::rdf ? "distortion" : "power") +
                        " is required for this kind");
    }
    config.budgets = parse_axis(axis);
  } else if (config.subcommand != Subcommand::verify) {
    const std::string& value = distortion.empty() ? power : distortion;
    config.budgets = {parse_number(value)};
  }
  if (!(config.radius >= 0.0)) throw ConfigError("--radius must be >= 0");
  for (double r : config.radii)
    if (!(r >= 0.0)) throw ConfigError("radii must be >= 0");
  return config;
}

void emit(const std::vector<ResultRow>& rows, OutputFormat format, Units units, std::ostream& out) {
  if (rows.empty()) throw ConfigError("no results to emit");
  const double bits_per_nat = 1.0 / std::log(2.0);
  const bool bits = units == Units::bits;
  if (format == OutputFormat::csv) {
    out << "r,budget,value_nats," << (bits ? "value_bits," : "") << "worst_case_trace\n";
    for (const ResultRow& r : rows) {
      out << format_number(r.radius) << ',' << format_number(r.budget) << ',' << format_number(r.value_nats) << ',';
      if (bits) out << format_number(r.value_nats * bits_per_nat) << ',';
      out << format_number(r.worst_case_trace) << '\n';
    }
  } else {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const ResultRow& r : rows) {
      nlohmann::ordered_json row;
      row["r"] = r.radius;
      row["budget"] = r.budget;
      row["value_nats"] = r.value_nats;
      if (bits) row["value_bits"] = r.value_nats * bits_per_nat;
      row["worst_case_trace"] = r.worst_case_trace;
      if (r.diagnostics) {
        const SolverDiagnostics& d = *r.diagnostics;
        row["diagnostics"] = {{"iterations", d.iterations},
                              {"final_step_norm", d.final_step_norm},
                              {"converged", d.converged},
                              {"solver_path", to_string(d.solver_path)},
                              {"center_jitter", d.center_jitter}};
      } else {
        row["diagnostics"] = nullptr;
      }
      doc.push_back(std::move(row));
    }
    out << doc.dump(2) << '\n';
  }
  out.flush();
  if (!out) throw IoError("failed writing results");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.subcommand == Subcommand::verify) return run_verify(config, out);
    const std::vector<ResultRow> rows = compute(config);
    // Buffer so a late failure leaves stdout empty.
    std::ostringstream buffer;
    emit(rows, config.output, config.units, buffer);
    out << buffer.str();
    out.flush();
    if (!out) throw IoError("failed writing results");
    return kExitOk;
  } catch (...) {
    return classify(std::current_exception(), err, "");
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> config;
  try {
    config = parse_args(argc, argv, out);
    if (!config) return kExitOk;
    if (const char* env = std::getenv("ROBUST_SHANNON_THREADS"); env != nullptr && *env != '\0') {
      const double t = parse_number(env);
      if (t < 0.0 || t != std::floor(t) || t > 4096.0) throw ConfigError("ROBUST_SHANNON_THREADS must be an integer in [0, 4096]");
      config->threads = static_cast<unsigned>(t);
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << '\n';
    return kExitConfig;
  }
  return run(*config, out, err);
}

}  // namespace robust_shannon::cli
