#pragma once

// Exact utilities by enumeration for models with a tractable pmf.
//
// Notation: U_A, U_H are the first mover's expected utilities; U_{s1 s2} is
// the second mover's when the first uses s1 and the second uses s2.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "monoculture/core.hpp"
#include "monoculture/models.hpp"

namespace monoculture {

enum class Strategy { A, H };

char to_char(Strategy s);

struct UtilityTable {
  double first_a = 0.0;
  double first_h = 0.0;
  double aa = 0.0;
  double ah = 0.0;
  double ha = 0.0;
  double hh = 0.0;
  /// Standard errors in the same order; all zero for exact tables.
  std::array<double, 6> errors{};

  double first(Strategy s) const { return s == Strategy::A ? first_a : first_h; }
  /// U_{first second}: utility of the second mover.
  double second(Strategy first, Strategy second) const;
  std::array<double, 6> as_array() const { return {first_a, first_h, aa, ah, ha, hh}; }
  static UtilityTable from_array(const std::array<double, 6>& v);
};

inline constexpr std::array<const char*, 6> kUtilityNames = {"u_first_A", "u_first_H", "u_AA",
                                                             "u_AH",      "u_HA",      "u_HH"};

struct SelectionPmf {
  /// Indexed by candidate - 1.
  std::vector<double> probabilities;

  double prob(int c) const { return probabilities[static_cast<std::size_t>(c - 1)]; }
  double expected_value(const CandidatePool& pool) const;
};

SelectionPmf exact_selection_pmf(const RankingModelSpec& spec, const CandidatePool& pool, CandidateSet removed = {});

/// Resolves the pool used for exact computation: the fixed pool itself, or the
/// expected order statistics for value-independent families. Throws
/// UnsupportedError otherwise.
CandidatePool exact_pool(const Family& family, const CandidateDistribution& values);

/// Exact table via first-choice and survivor distributions,
/// e.g. U_AH = sum_c Pr_A[first = c] E_H[top survivor | c taken].
UtilityTable exact_utility_table(double theta_a, double theta_h, const Family& family,
                                 const CandidateDistribution& values);

/// The same table by enumerating independent ranking pairs with product
/// weights, (n!)^2 terms per cross entry. Independent oracle for the above.
UtilityTable exact_utility_table_pairwise(double theta_a, double theta_h, const Family& family,
                                          const CandidateDistribution& values, int threads = 0);

/// |(U_AH - U_AA) - E[(pi_1 - pi_2) 1{pi_1 != sigma_1}]| with the right-hand
/// side enumerated over pairs. Needs theta_a == theta_h.
double identity_check_uah_uaa(double theta_a, double theta_h, const Family& family,
                              const CandidateDistribution& values, int threads = 0);

enum class Profile { AA, AH, HH };

/// W_AA = U_A + U_AA, W_HH = U_H + U_HH, W_AH = (U_A + U_AH)/2 + (U_H + U_HA)/2.
double exact_welfare(const UtilityTable& table, Profile profile);

/// Fixed-order k-firm hiring under Mallows: one shared algorithmic ranking
/// with phi_a, an independent human ranking with phi_h per H firm.
class SequentialMallowsGame {
 public:
  SequentialMallowsGame(double phi_a, double phi_h, const CandidateDistribution& values);

  int n() const { return n_; }
  double phi_a() const { return phi_a_; }
  double phi_h() const { return phi_h_; }
  /// Expected value of each rank (E[x_(i)]); what utilities are computed against.
  const std::vector<double>& rank_values() const { return values_; }

  /// Row f: Pr[the f-th firm to hire gets candidate c], c = 1..n.
  std::vector<std::vector<double>> assignment_probabilities(std::span<const Strategy> sequence) const;
  std::vector<double> utilities(std::span<const Strategy> sequence) const;
  /// Each firm in turn takes its better strategy given the earlier choices;
  /// exact ties (within 1e-12) go to H.
  std::vector<Strategy> optimal_sequence(int k) const;

 private:
  void check_length(std::size_t k) const;

  double phi_a_;
  double phi_h_;
  int n_;
  std::vector<double> values_;
  std::vector<double> pmf_a_;
  MallowsModel human_;
};

std::vector<double> exact_sequential_utilities(std::span<const Strategy> sequence, double phi_a, double phi_h,
                                               const CandidateDistribution& values);

}  // namespace monoculture
