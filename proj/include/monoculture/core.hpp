#pragma once

// Shared vocabulary: candidates, permutations, candidate subsets and the
// distributions candidate values are drawn from.
//
// Candidate indices are 1-based and index i always denotes the i-th best
// candidate. Permutations store indices only; values live in CandidatePool.

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace monoculture {

using Rng = std::mt19937_64;

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Requested computation is not available for this model (e.g. exact
/// enumeration of a continuous-noise RUM at large n).
struct UnsupportedError : std::logic_error {
  using std::logic_error::logic_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Largest pool handled by the enumeration code paths.
inline constexpr int kMaxEnumerationSize = 8;

/// Set of candidate indices, stored as a bitmask (bit i-1 for candidate i).
class CandidateSet {
 public:
  CandidateSet() = default;
  CandidateSet(std::initializer_list<int> members);

  static CandidateSet from_mask(std::uint32_t mask) {
    CandidateSet s;
    s.mask_ = mask;
    return s;
  }
  static CandidateSet all(int n) { return from_mask(n >= 32 ? ~0u : (1u << n) - 1u); }

  bool contains(int i) const { return (mask_ >> (i - 1)) & 1u; }
  void insert(int i);
  CandidateSet with(int i) const {
    CandidateSet s = *this;
    s.insert(i);
    return s;
  }
  int size() const;
  bool empty() const { return mask_ == 0; }
  std::uint32_t mask() const { return mask_; }
  std::vector<int> members() const;

  CandidateSet operator|(CandidateSet o) const { return from_mask(mask_ | o.mask_); }
  CandidateSet operator&(CandidateSet o) const { return from_mask(mask_ & o.mask_); }
  bool operator==(const CandidateSet&) const = default;

 private:
  std::uint32_t mask_ = 0;
};

/// True candidate values x_1 > x_2 > ... > x_n.
class CandidatePool {
 public:
  explicit CandidatePool(std::vector<double> values);

  int size() const { return static_cast<int>(values_.size()); }
  /// Value of candidate i (1-based).
  double value(int i) const { return values_[static_cast<std::size_t>(i - 1)]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Known joint distribution over candidate values. A fixed pool is the
/// degenerate case, so every "pool or distribution" argument takes this type.
class CandidateDistribution {
 public:
  enum class Kind { fixed, uniform, uniform_centered };

  CandidateDistribution(const CandidatePool& pool);  // NOLINT: implicit by design of the API
  static CandidateDistribution fixed(CandidatePool pool) { return CandidateDistribution(pool); }
  static CandidateDistribution uniform(double lo, double hi, int n);
  static CandidateDistribution uniform_centered(double halfwidth, int n);
  /// Uniform on [-sqrt(3), sqrt(3)]: unit variance.
  static CandidateDistribution unit_variance_uniform(int n);

  Kind kind() const { return kind_; }
  bool is_fixed() const { return kind_ == Kind::fixed; }
  int size() const { return n_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  /// Fixed pool; throws ArgumentError unless kind() == fixed.
  const CandidatePool& pool() const;

  /// Draws a pool; resamples on (probability-zero) ties.
  CandidatePool sample(Rng& rng) const;

  /// E[x_(i)] for the descending order statistics; the pool itself when fixed.
  std::vector<double> expected_order_statistics() const;
  /// Expected order statistics as a pool (exact input for value-independent models).
  CandidatePool mean_pool() const { return CandidatePool(expected_order_statistics()); }

  std::string describe() const;

 private:
  CandidateDistribution(Kind kind, double lo, double hi, int n);

  Kind kind_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  int n_ = 0;
  std::optional<CandidatePool> pool_;
};

/// A ranking: candidate indices, best-ranked first.
class Permutation {
 public:
  explicit Permutation(std::vector<int> order);
  static Permutation identity(int n);

  int size() const { return static_cast<int>(order_.size()); }
  /// Candidate at 0-based position p.
  int operator[](int p) const { return order_[static_cast<std::size_t>(p)]; }
  int top() const { return order_.front(); }
  std::span<const int> order() const { return order_; }
  std::string to_string() const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> order_;
};

/// pi^{(-S)}: the permutation with the candidates in S removed.
struct PartialRanking {
  std::vector<int> order;
  CandidateSet removed;

  int top() const { return order.front(); }
};

/// Number of candidate pairs ordered differently by the two rankings.
int kendall_tau(const Permutation& pi, const Permutation& sigma);

PartialRanking remove_candidates(const Permutation& pi, CandidateSet removed);

double top_value(const PartialRanking& ranking, const CandidatePool& pool);

/// E[x_(i)] of n i.i.d. uniforms on [lo, hi], descending: lo + (hi-lo)(n+1-i)/(n+1).
std::vector<double> uniform_order_statistic_means(int n, double lo, double hi);

/// All n! permutations of 1..n in lexicographic order (index 0 is the
/// identity), stored flat as 1-based candidate indices.
class PermutationTable {
 public:
  static const PermutationTable& of_size(int n);

  int n() const { return n_; }
  std::size_t count() const { return count_; }
  std::span<const std::uint8_t> row(std::size_t k) const {
    return {data_.data() + k * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  Permutation permutation(std::size_t k) const;
  /// Kendall tau distance of row k from the identity.
  int inversions(std::size_t k) const { return inversions_[k]; }
  /// Index of the row equal to the given permutation.
  std::size_t index_of(const Permutation& pi) const;

 private:
  explicit PermutationTable(int n);

  int n_;
  std::size_t count_;
  std::vector<std::uint8_t> data_;
  std::vector<int> inversions_;
};

/// First candidate of the row not in `removed`.
inline int first_surviving(std::span<const std::uint8_t> row, std::uint32_t removed_mask) {
  for (std::uint8_t c : row) {
    if (((removed_mask >> (c - 1)) & 1u) == 0) return c;
  }
  return 0;
}

}  // namespace monoculture
