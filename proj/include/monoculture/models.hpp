#pragma once

// Noisy ranking families: Mallows (Kendall tau), random utility models and
// Plackett-Luce. Each supports sampling; exact pmfs are available at small n.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "monoculture/core.hpp"
#include "monoculture/noise.hpp"

namespace monoculture {

/// A ranking family without its accuracy parameter.
class Family {
 public:
  enum class Kind { mallows, rum, plackett_luce };

  static Family mallows() { return Family(Kind::mallows, NoiseSpec::gaussian()); }
  static Family rum(NoiseSpec noise) { return Family(Kind::rum, std::move(noise)); }
  static Family plackett_luce() { return Family(Kind::plackett_luce, NoiseSpec::gumbel()); }
  /// family is "mallows", "rum" or "plackett-luce"/"pl"; noise only matters for "rum".
  static Family parse(const std::string& family, const std::string& noise = "gaussian");

  Kind kind() const { return kind_; }
  bool is_mallows() const { return kind_ == Kind::mallows; }
  bool is_rum() const { return kind_ == Kind::rum; }
  bool is_plackett_luce() const { return kind_ == Kind::plackett_luce; }
  /// Noise of a RUM; throws for other kinds.
  const NoiseSpec& noise() const;
  /// Rankings do not depend on candidate values (only Mallows).
  bool value_independent() const { return is_mallows(); }
  /// Exact permutation pmf available for a pool of n candidates.
  bool exact_available(int n) const;
  std::string name() const;

 private:
  Family(Kind kind, NoiseSpec noise) : kind_(kind), noise_(std::move(noise)) {}

  Kind kind_;
  NoiseSpec noise_;
};

/// Family plus accuracy theta. For Mallows phi = theta + 1.
class RankingModelSpec {
 public:
  RankingModelSpec(Family family, double theta);
  static RankingModelSpec mallows_phi(double phi) { return {Family::mallows(), phi - 1.0}; }

  const Family& family() const { return family_; }
  double theta() const { return theta_; }
  double phi() const { return theta_ + 1.0; }
  std::string name() const;

 private:
  Family family_;
  double theta_;
};

/// Pr[first surviving candidate = c | removed set] for every removed mask,
/// built by summing a permutation pmf. Rows are indexed by mask, columns by c-1.
class SurvivorTable {
 public:
  SurvivorTable(std::span<const double> pmf, int n);

  int n() const { return n_; }
  double prob(std::uint32_t removed_mask, int c) const {
    return data_[static_cast<std::size_t>(removed_mask) * static_cast<std::size_t>(n_) +
                 static_cast<std::size_t>(c - 1)];
  }
  std::span<const double> row(std::uint32_t removed_mask) const {
    return {data_.data() + static_cast<std::size_t>(removed_mask) * static_cast<std::size_t>(n_),
            static_cast<std::size_t>(n_)};
  }

 private:
  int n_;
  std::vector<double> data_;
};

class MallowsModel {
 public:
  MallowsModel(double phi, int n);

  double phi() const { return phi_; }
  int n() const { return n_; }
  /// Z = prod_{j=1..n} sum_{r=0..j-1} phi^{-r}.
  double normalizer() const { return z_; }
  double pmf(const Permutation& pi) const;
  /// Probability of a permutation with the given number of inversions.
  double pmf_of_inversions(int inversions) const;
  /// Repeated insertion: item j goes r places ahead of its correct slot with
  /// probability proportional to phi^{-r}.
  Permutation sample(Rng& rng) const;
  void sample_into(Rng& rng, std::vector<int>& order) const;

  /// Pr[i is the top surviving candidate after `removed` are taken].
  /// Closed form when the survivors form a contiguous block of indices,
  /// exact enumeration otherwise (n <= kMaxEnumerationSize).
  double first_choice(int i, CandidateSet removed = {}) const;
  /// The whole first-choice distribution, indexed by candidate - 1.
  std::vector<double> first_choice_pmf(CandidateSet removed = {}) const;
  /// (1 - 1/phi) / (phi^{rank-1} (1 - phi^{-m})) for a block of m candidates.
  static double block_first_choice(double phi, int m, int rank);

  /// Exact pmf over PermutationTable::of_size(n) rows.
  std::vector<double> permutation_pmf() const;
  const SurvivorTable& survivor_table() const;

 private:
  double phi_;
  int n_;
  double z_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

/// Sequential softmax with weights exp(theta * x).
double pl_pmf(double theta, const CandidatePool& pool, const Permutation& pi);
/// Gumbel-max construction of a Plackett-Luce ranking.
Permutation pl_sample(double theta, const CandidatePool& pool, Rng& rng);

/// Raised when discrete noise makes two perturbed values coincide.
struct TieError : NumericalError {
  TieError(int a, int b);
  int first;
  int second;
};

/// Ranks x_i + eps_i / theta in decreasing order.
Permutation rum_sample(const NoiseSpec& noise, double theta, const CandidatePool& pool, Rng& rng);

/// Reusable sampler for one model on pools of a fixed size.
class RankingSampler {
 public:
  RankingSampler(const RankingModelSpec& spec, int n);
  /// Writes the sampled order (candidate indices, best first) into `order`.
  void sample_into(const CandidatePool& pool, Rng& rng, std::vector<int>& order) const;
  Permutation sample(const CandidatePool& pool, Rng& rng) const;

 private:
  RankingModelSpec spec_;
  int n_;
  std::shared_ptr<const MallowsModel> mallows_;
};

/// Exact pmf over PermutationTable::of_size(n) rows. Mallows, Plackett-Luce
/// and Gumbel RUMs for n <= 8; discrete RUMs by enumerating the joint atoms;
/// other continuous RUMs for n <= 3 by 1-D quadrature.
std::vector<double> permutation_pmf(const RankingModelSpec& spec, const CandidatePool& pool);

/// Pr[X_i > X_j | X_i < a, X_j < a] with X = x + eps/theta, xi > xj.
/// Closed form for Laplace noise, quadrature for Gaussian noise.
double conditional_order_probability(const NoiseSpec& noise, double xi, double xj, double theta, double a);
/// Same quantity by direct quadrature for any noise with a density.
double conditional_order_probability_quadrature(const NoiseSpec& noise, double xi, double xj, double theta, double a);
/// Unconditional Pr[X_i > X_j] (the a -> infinity limit).
double order_probability(const NoiseSpec& noise, double xi, double xj, double theta);

/// log f(a-c) + log f(b-d) - log f(a-d) - log f(b-c); a > b, c > d.
double well_ordered_margin(const NoiseSpec& noise, double a, double b, double c, double d);
/// f(a-c) f(b-d) > f(a-d) f(b-c), compared in log space.
bool well_ordered_check(const NoiseSpec& noise, double a, double b, double c, double d);

}  // namespace monoculture
