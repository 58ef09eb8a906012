#include "monoculture/core.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

namespace monoculture {

CandidateSet::CandidateSet(std::initializer_list<int> members) {
  for (int i : members) insert(i);
}

void CandidateSet::insert(int i) {
  if (i < 1 || i > 32) throw ArgumentError("candidate index out of range: " + std::to_string(i));
  mask_ |= 1u << (i - 1);
}

int CandidateSet::size() const { return std::popcount(mask_); }

std::vector<int> CandidateSet::members() const {
  std::vector<int> out;
  for (int i = 1; i <= 32; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

CandidatePool::CandidatePool(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw ArgumentError("candidate pool needs at least 2 candidates");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw ArgumentError("candidate values must be finite");
    if (i > 0 && !(values_[i - 1] > values_[i])) {
      throw ArgumentError("candidate values must be strictly decreasing");
    }
  }
}

CandidateDistribution::CandidateDistribution(const CandidatePool& pool)
    : kind_(Kind::fixed), n_(pool.size()), pool_(pool) {}

CandidateDistribution::CandidateDistribution(Kind kind, double lo, double hi, int n)
    : kind_(kind), lo_(lo), hi_(hi), n_(n) {
  if (n < 2) throw ArgumentError("candidate distribution needs n >= 2");
  if (!(lo < hi)) throw ArgumentError("uniform distribution needs lo < hi");
}

CandidateDistribution CandidateDistribution::uniform(double lo, double hi, int n) {
  return CandidateDistribution(Kind::uniform, lo, hi, n);
}

CandidateDistribution CandidateDistribution::uniform_centered(double halfwidth, int n) {
  return CandidateDistribution(Kind::uniform_centered, -halfwidth, halfwidth, n);
}

CandidateDistribution CandidateDistribution::unit_variance_uniform(int n) {
  return uniform_centered(std::sqrt(3.0), n);
}

const CandidatePool& CandidateDistribution::pool() const {
  if (!pool_) throw ArgumentError("distribution is not a fixed pool");
  return *pool_;
}

CandidatePool CandidateDistribution::sample(Rng& rng) const {
  if (pool_) return *pool_;
  std::uniform_real_distribution<double> u(lo_, hi_);
  std::vector<double> v(static_cast<std::size_t>(n_));
  for (;;) {
    for (double& x : v) x = u(rng);
    std::sort(v.begin(), v.end(), std::greater<>());
    if (std::adjacent_find(v.begin(), v.end()) == v.end()) return CandidatePool(v);
  }
}

std::vector<double> CandidateDistribution::expected_order_statistics() const {
  if (pool_) return {pool_->values().begin(), pool_->values().end()};
  return uniform_order_statistic_means(n_, lo_, hi_);
}

std::string CandidateDistribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::fixed:
      os << "pool:";
      for (int i = 1; i <= n_; ++i) os << (i > 1 ? "," : "") << pool_->value(i);
      break;
    case Kind::uniform:
      os << "uniform:" << lo_ << ":" << hi_ << ":" << n_;
      break;
    case Kind::uniform_centered:
      os << "uniform-centered:" << hi_ << ":" << n_;
      break;
  }
  return os.str();
}

Permutation::Permutation(std::vector<int> order) : order_(std::move(order)) {
  const int n = size();
  if (n < 1) throw ArgumentError("empty permutation");
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  for (int c : order_) {
    if (c < 1 || c > n || seen[static_cast<std::size_t>(c)]) {
      throw ArgumentError("permutation is not a bijection on 1..n");
    }
    seen[static_cast<std::size_t>(c)] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  return Permutation(std::move(order));
}

std::string Permutation::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(order_[i]);
  }
  return s + ")";
}

int kendall_tau(const Permutation& pi, const Permutation& sigma) {
  if (pi.size() != sigma.size()) throw ArgumentError("kendall_tau: permutations differ in size");
  const int n = pi.size();
  std::vector<int> pos(static_cast<std::size_t>(n) + 1);
  for (int p = 0; p < n; ++p) pos[static_cast<std::size_t>(sigma[p])] = p;
  int discordant = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (pos[static_cast<std::size_t>(pi[a])] > pos[static_cast<std::size_t>(pi[b])]) ++discordant;
    }
  }
  return discordant;
}

PartialRanking remove_candidates(const Permutation& pi, CandidateSet removed) {
  PartialRanking out;
  out.removed = removed;
  for (int c : pi.order()) {
    if (!removed.contains(c)) out.order.push_back(c);
  }
  if (out.order.empty()) throw ArgumentError("remove_candidates: cannot remove every candidate");
  return out;
}

double top_value(const PartialRanking& ranking, const CandidatePool& pool) {
  if (ranking.order.empty()) throw ArgumentError("top_value: empty ranking");
  return pool.value(ranking.top());
}

std::vector<double> uniform_order_statistic_means(int n, double lo, double hi) {
  if (n < 1) throw ArgumentError("order statistics need n >= 1");
  if (!(lo < hi)) throw ArgumentError("order statistics need lo < hi");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    out[static_cast<std::size_t>(i - 1)] = lo + (hi - lo) * (n + 1 - i) / (n + 1);
  }
  return out;
}

PermutationTable::PermutationTable(int n) : n_(n) {
  std::vector<std::uint8_t> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), std::uint8_t{1});
  count_ = 1;
  for (int k = 2; k <= n; ++k) count_ *= static_cast<std::size_t>(k);
  data_.reserve(count_ * static_cast<std::size_t>(n));
  inversions_.reserve(count_);
  do {
    data_.insert(data_.end(), p.begin(), p.end());
    int inv = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) inv += p[static_cast<std::size_t>(a)] > p[static_cast<std::size_t>(b)];
    inversions_.push_back(inv);
  } while (std::next_permutation(p.begin(), p.end()));
}

const PermutationTable& PermutationTable::of_size(int n) {
  if (n < 1 || n > kMaxEnumerationSize) {
    throw UnsupportedError("permutation enumeration supports 1 <= n <= " +
                           std::to_string(kMaxEnumerationSize));
  }
  static std::array<std::once_flag, kMaxEnumerationSize + 1> flags;
  static std::array<std::unique_ptr<PermutationTable>, kMaxEnumerationSize + 1> tables;
  const auto k = static_cast<std::size_t>(n);
  std::call_once(flags[k], [&] { tables[k].reset(new PermutationTable(n)); });
  return *tables[k];
}

Permutation PermutationTable::permutation(std::size_t k) const {
  auto r = row(k);
  return Permutation(std::vector<int>(r.begin(), r.end()));
}

std::size_t PermutationTable::index_of(const Permutation& pi) const {
  if (pi.size() != n_) throw ArgumentError("permutation size does not match table");
  // Lexicographic rank via the factorial number system.
  std::size_t rank = 0;
  std::vector<bool> used(static_cast<std::size_t>(n_) + 1, false);
  std::size_t fact = count_;
  for (int p = 0; p < n_; ++p) {
    fact /= static_cast<std::size_t>(n_ - p);
    int smaller = 0;
    for (int c = 1; c < pi[p]; ++c) smaller += used[static_cast<std::size_t>(c)] ? 0 : 1;
    rank += static_cast<std::size_t>(smaller) * fact;
    used[static_cast<std::size_t>(pi[p])] = true;
  }
  return rank;
}

}  // namespace monoculture
