#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "robust_shannon/compound.hpp"
#include "robust_shannon/oracle.hpp"

namespace robust_shannon::cli {

enum class Subcommand { rdf, capacity, compound_rdf, compound_capacity, sweep, verify };
enum class Units { nats, bits };
enum class OutputFormat { csv, json };

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // verify: at least one check failed
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNoConverge = 3;
inline constexpr int kExitIo = 4;

class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct RunConfig {
  Subcommand subcommand = Subcommand::rdf;
  std::string center_path;
  std::optional<double> sigma0_scalar;  // takes precedence over center_path
  std::string channel_path;             // empty: H = I
  double radius = 0.0;
  std::vector<double> radii;    // sweep
  std::vector<double> budgets;  // D or B; exactly one outside sweep
  CompoundKind kind = CompoundKind::rdf;
  Units units = Units::nats;
  OutputFormat output = OutputFormat::csv;
  std::uint64_t seed = 0;
  std::string suite = "all";
  unsigned threads = 1;
  SolverOptions solver;
};

struct ResultRow {
  double radius;
  double budget;
  double value_nats;
  double worst_case_trace;
  std::optional<SolverDiagnostics> diagnostics;
};

/// "x", "a,b,c" or "start:stop:count" (inclusive, evenly spaced, count >= 1).
std::vector<double> parse_axis(const std::string& spec);

/// Throws ConfigError on bad flags. Returns nullopt when help was printed.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// CSV: header r,budget,value_nats[,value_bits],worst_case_trace with
/// 17 significant digits and LF endings. JSON: array of objects with the
/// same keys plus diagnostics.
void emit(const std::vector<ResultRow>& rows, OutputFormat format, Units units, std::ostream& out);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run; reads ROBUST_SHANNON_THREADS.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace robust_shannon::cli
