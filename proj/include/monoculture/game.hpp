#pragma once

// Two-firm selection game in random hiring order, the theta_A* construction,
// plane sweeps, and the k-firm sequential and random-order games (Mallows).

#include <optional>
#include <string>
#include <vector>

#include "monoculture/estimators.hpp"
#include "monoculture/exact.hpp"

namespace monoculture {

/// payoff(own, rival) = U_first(own)/2 + U_{rival own}/2.
struct PayoffMatrix {
  double a_vs_a;
  double a_vs_h;
  double h_vs_a;
  double h_vs_h;

  static PayoffMatrix from(const UtilityTable& t);
  double payoff(Strategy own, Strategy rival) const;
};

struct DominanceFlags {
  /// U_A + U_AA - (U_H + U_AH): A is the better reply to A.
  double margin1;
  /// U_A + U_HA - (U_H + U_HH): A is the better reply to H.
  double margin2;
  bool dom1;
  bool dom2;
  /// Some margin lies within the tie tolerance.
  bool weak;

  bool a_dominant() const { return dom1 && dom2; }
};

DominanceFlags check_dominance(const UtilityTable& table, double tol = 1e-12);

enum class EquilibriumLabel { HH, AA, AH_asymmetric };

std::string to_string(EquilibriumLabel label);

struct EquilibriumOutcome {
  EquilibriumLabel label;
  /// Symmetric mixed equilibrium probability of A, when one exists in (0,1).
  std::optional<double> p_mixed;
  double welfare_aa;
  double welfare_hh;
  double welfare_ah;
  bool braess;
  /// A best-response comparison was an exact tie.
  bool boundary;
  /// Both AA and HH were stable; the label is the welfare-better one.
  bool coordination;
  DominanceFlags dominance;
};

EquilibriumOutcome classify_equilibrium(const UtilityTable& table, double tol = 1e-12);

/// Evaluates utility tables for one family and candidate distribution,
/// exactly when possible and by Monte Carlo otherwise.
class TableSource {
 public:
  TableSource(Family family, CandidateDistribution values, Engine engine, McOptions options = {});

  UtilityTable operator()(double theta_a, double theta_h) const;
  /// Monte Carlo result with covariances; only for the mc engine.
  McUtilityResult mc(double theta_a, double theta_h) const;
  Engine engine() const { return engine_; }
  const Family& family() const { return family_; }
  const CandidateDistribution& values() const { return values_; }
  const McOptions& options() const { return options_; }

 private:
  Family family_;
  CandidateDistribution values_;
  Engine engine_;
  McOptions options_;
};

struct BracketError : NumericalError {
  using NumericalError::NumericalError;
};

struct ThetaStarResult {
  double theta_h;
  double theta_star;
  /// f - g at theta_star, f = U_A + U_AA, g = U_H + U_AH.
  double gap_at_star;
  double welfare_aa_at_star;
  /// U_H + U_AH at theta_star.
  double g_at_star;
  std::optional<double> theta_prime;
  std::optional<UtilityTable> table_at_prime;
  std::string message;
};

/// Bisection on f - g over [theta_h, 64 theta_h], widening up to
/// 1024 theta_h. The witness theta_prime = theta_star (1 + 2^-m), taking the
/// largest m in 20..0 where dom1 and dom2 hold strictly and W_AA < W_HH.
/// Throws BracketError when f - g has no sign change on the bracket.
ThetaStarResult find_theta_star(double theta_h, const TableSource& tables, double tol = 1e-6);

struct SweepCell {
  double theta_h;
  double theta_a;
  std::optional<EquilibriumOutcome> outcome;
  std::optional<UtilityTable> table;
  /// k-firm sweeps: the sequential optimal sequence.
  std::string sequence;
  unsigned binary_value = 0;
  std::string error;
};

/// Two-firm classification per cell, row-major (theta_h outer).
std::vector<SweepCell> sweep_plane(const std::vector<double>& theta_h, const std::vector<double>& theta_a,
                                   const Family& family, const CandidateDistribution& values, Engine engine,
                                   const McOptions& options);

class StrategySequence {
 public:
  StrategySequence() = default;
  explicit StrategySequence(std::vector<Strategy> choices) : choices_(std::move(choices)) {}
  /// Parses a string over {A, H}, e.g. "AAAHH".
  static StrategySequence parse(const std::string& text);

  const std::vector<Strategy>& choices() const { return choices_; }
  std::size_t size() const { return choices_.size(); }
  /// A = 1, H = 0, first firm most significant: AAAHH -> 28.
  unsigned binary_value() const;
  std::string to_string() const;
  bool operator==(const StrategySequence&) const = default;

 private:
  std::vector<Strategy> choices_;
};

StrategySequence sequential_optimal_sequence(int k, double phi_a, double phi_h, const CandidateDistribution& values);

/// Mallows k-firm sweep over a phi_H x phi_A lattice, row-major.
std::vector<SweepCell> sweep_sequences(const std::vector<double>& phi_h, const std::vector<double>& phi_a, int k,
                                       const CandidateDistribution& values, int threads = 0);

struct ScanReport {
  double phi_h;
  std::vector<double> phi_a;
  std::vector<StrategySequence> labels;
  bool monotone;
  /// Index into the scan of the first decrease, if any.
  std::optional<std::size_t> first_violation;
};

/// Optimal sequences along increasing phi_A at fixed phi_H, and whether their
/// binary values never decrease.
ScanReport binary_counter_scan(double phi_h, const std::vector<double>& phi_a_grid, int k,
                               const CandidateDistribution& values);

/// Random-order k-firm game. Firms are symmetric, so a profile is described
/// by how many firms use the algorithm.
class KFirmGame {
 public:
  KFirmGame(int k, double phi_a, double phi_h, const CandidateDistribution& values);

  int k() const { return k_; }
  /// Utility of an A firm (or H firm) averaged over all k! hiring orders when
  /// `algorithm_firms` of the k firms use A. Undefined combinations throw.
  double utility_a(int algorithm_firms) const;
  double utility_h(int algorithm_firms) const;
  /// Average per-firm utility.
  double average_utility(int algorithm_firms) const;
  /// A is a strict best response against every profile of the others.
  bool a_dominant() const;
  /// Profiles (by number of A firms) where nobody gains by switching.
  std::vector<int> pure_equilibria() const;

 private:
  int k_;
  std::vector<double> util_a_;
  std::vector<double> util_h_;
};

struct KFirmBraessReport {
  int k;
  double phi_a;
  double phi_h;
  /// Number of A firms in each pure equilibrium.
  std::vector<int> equilibria;
  bool a_dominant;
  /// Per-firm utility when every firm uses A / H.
  double utility_all_a;
  double utility_all_h;
  /// Per-firm utility at the first listed equilibrium.
  double equilibrium_utility;
  bool braess;
};

KFirmBraessReport kfirm_braess_check(int k, double phi_a, double phi_h, const CandidateDistribution& values);

}  // namespace monoculture
