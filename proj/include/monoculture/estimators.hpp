#pragma once

// Monte Carlo estimates with common random numbers, and the condition checks
// for preference for the first position, preference for weaker competition
// and monotonicity.
//
// Trials are split into a fixed number of chunks, each with its own seeded
// stream, and reduced in chunk order: results do not depend on thread count.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "monoculture/core.hpp"
#include "monoculture/exact.hpp"
#include "monoculture/models.hpp"

namespace monoculture {

struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;

  /// mean / std_error; +-inf for a nonzero exact value, 0 for an exact zero.
  double z_score() const;
};

enum class Verdict { holds, fails, inconclusive };
enum class Condition { pref_first_position, pref_weaker_competition, monotonicity };
enum class Engine { exact, mc };

std::string to_string(Verdict v);
std::string to_string(Condition c);
std::string to_string(Engine e);
Engine parse_engine(const std::string& text);

struct ConditionReport {
  Condition condition;
  /// The tested quantity; for monotonicity the least favorable step.
  EstimateWithError estimate;
  Verdict verdict;
  /// Monotonicity only: E[top survivor] per grid point.
  std::vector<EstimateWithError> points;
  /// Monotonicity only: paired differences between consecutive grid points.
  std::vector<EstimateWithError> steps;
};

/// holds iff z > threshold, fails iff z < -threshold.
Verdict verdict_for(const EstimateWithError& e, double z_threshold);

struct McOptions {
  std::size_t n_samples = 1'000'000;
  std::uint64_t seed = 1;
  int threads = 0;
  double z_threshold = 3.0;
  std::size_t chunks = 256;
};

struct McUtilityResult {
  UtilityTable table;
  std::array<double, 6> mean{};
  /// Sample covariance of the per-trial 6-vectors.
  std::array<std::array<double, 6>, 6> covariance{};
  std::size_t n_samples = 0;

  /// Estimate of sum_k coefficients[k] * mean[k] with its paired standard error.
  EstimateWithError contrast(const std::array<double, 6>& coefficients) const;
  /// Entry k with its standard error.
  EstimateWithError entry(std::size_t k) const;
};

/// Each trial draws a pool (a fresh one unless fixed), one algorithmic ranking
/// sigma and two independent human rankings pi, tau, then records
/// U_A = sigma_1, U_H = tau_1, U_AA = sigma_2, U_AH = pi after sigma_1,
/// U_HA = sigma after tau_1, U_HH = pi after tau_1.
McUtilityResult mc_utility_table(double theta_a, double theta_h, const Family& family,
                                 const CandidateDistribution& values, const McOptions& options);

/// E[(pi_1 - pi_2) 1{pi_1 != sigma_1}], pi and sigma independent at theta.
ConditionReport check_pref_first_position(const RankingModelSpec& spec, const CandidateDistribution& values,
                                          const McOptions& options, Engine engine = Engine::mc);

/// E[pi_1 after tau_1] - E[pi_1 after sigma_1], sigma at theta1 > theta2,
/// pi and tau at theta2.
ConditionReport check_pref_weaker_competition(const Family& family, double theta1, double theta2,
                                              const CandidateDistribution& values, const McOptions& options,
                                              Engine engine = Engine::mc);

/// E[pi_1^(-S)] along an increasing theta grid. Holds when every step is
/// nondecreasing within error and, for S empty, strictly increasing.
ConditionReport check_monotonicity(const Family& family, const std::vector<double>& theta_grid, CandidateSet removed,
                                   const CandidateDistribution& values, const McOptions& options,
                                   Engine engine = Engine::mc);

/// Exact engine is usable for this family and candidate distribution.
bool exact_supported(const Family& family, const CandidateDistribution& values);

}  // namespace monoculture
