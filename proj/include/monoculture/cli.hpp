#pragma once

// Command-line front end: run configuration, CSV output, subcommands, pinned
// reproduction targets and verification suites.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "monoculture/estimators.hpp"
#include "monoculture/game.hpp"

namespace monoculture::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kFailure = 2, kNumerical = 3 };

/// Invalid or contradictory configuration, reported before any work starts.
struct ConfigError : ArgumentError {
  using ArgumentError::ArgumentError;
};

/// Inclusive range "lo:hi:step".
struct GridRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  static GridRange parse(const std::string& text);
  std::vector<double> values() const;
};

/// "lo:hi:step x lo:hi:step" (the separator may also be the multiplication
/// sign). The first range is theta_H, the second theta_A.
struct Grid {
  GridRange theta_h;
  GridRange theta_a;

  static Grid parse(const std::string& text);
};

std::vector<double> parse_number_list(const std::string& text);
/// "uniform:lo:hi:n", "uniform-centered:halfwidth:n" or "unit-uniform:n".
CandidateDistribution parse_distribution(const std::string& text);

struct RunConfig {
  std::string family = "mallows";
  std::string noise = "gaussian";
  std::optional<double> theta_h;
  std::optional<double> theta_a;
  /// Mallows only: phi = theta + 1, converted on resolution.
  std::optional<double> phi_h;
  std::optional<double> phi_a;
  std::string grid;
  std::string pool;
  std::string dist;
  /// "exact", "mc" or "auto" (exact when supported).
  std::string engine = "auto";
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 1;
  int threads = 0;
  int k = 2;
  std::string sequence;
  std::string thetas;
  std::string removed;
  double tol = 0.0;
  std::string out;
  std::string plot;

  Family family_spec() const;
  CandidateDistribution values() const;
  /// Resolved engine; throws ConfigError when exact is requested but unavailable.
  Engine engine_for(const Family& family, const CandidateDistribution& values) const;
  McOptions mc_options() const;
  double resolved_theta_h() const;
  double resolved_theta_a() const;
  double resolved_phi_h() const;
  double resolved_phi_a() const;
  std::optional<Grid> resolved_grid() const;
};

/// Formats with 17 significant digits ("%.17g").
std::string format_number(double x);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
  std::size_t columns_;
};

/// Outcome of one checked claim or invariant.
struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

struct Report {
  std::string title;
  std::vector<Check> checks;

  void add(std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
  }
  bool all_pass() const;
  void print(std::ostream& os) const;
};

/// Sweep rows; phi columns (theta + 1) are filled for Mallows.
void write_sweep_csv(const std::vector<SweepCell>& cells, bool mallows, std::ostream& csv);

void cmd_utilities(const RunConfig& config, std::ostream& csv);
void cmd_sweep(const RunConfig& config, std::ostream& csv, std::ostream* plot);
void cmd_sequential(const RunConfig& config, std::ostream& csv);
/// Returns false when some condition fails.
bool cmd_conditions(const RunConfig& config, std::ostream& csv);
void cmd_braess_search(const RunConfig& config, std::ostream& csv);

const std::vector<std::string>& reproduce_targets();
/// Runs a pinned configuration; `csv` receives the underlying data when given.
Report reproduce(const std::string& target, int threads, std::ostream* csv);

const std::vector<std::string>& verify_suites();
Report verify(const std::string& suite, int threads);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace monoculture::cli
