#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <random>

#include "monoculture/models.hpp"

namespace monoculture {

SurvivorTable::SurvivorTable(std::span<const double> pmf, int n) : n_(n) {
  const PermutationTable& perms = PermutationTable::of_size(n);
  if (pmf.size() != perms.count()) throw ArgumentError("pmf size does not match n!");
  const std::uint32_t full = (1u << n) - 1u;
  data_.assign(static_cast<std::size_t>(full + 1) * static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < perms.count(); ++k) {
    const double w = pmf[k];
    if (w == 0.0) continue;
    auto row = perms.row(k);
    for (std::uint32_t mask = 0; mask < full; ++mask) {
      const int c = first_surviving(row, mask);
      data_[static_cast<std::size_t>(mask) * static_cast<std::size_t>(n) + static_cast<std::size_t>(c - 1)] += w;
    }
  }
}

struct MallowsModel::Cache {
  std::once_flag once;
  std::unique_ptr<SurvivorTable> table;
};

MallowsModel::MallowsModel(double phi, int n) : phi_(phi), n_(n), cache_(std::make_shared<Cache>()) {
  if (!(phi > 1.0) || !std::isfinite(phi)) throw ArgumentError("Mallows needs phi > 1");
  if (n < 1) throw ArgumentError("Mallows needs n >= 1");
  z_ = 1.0;
  for (int j = 1; j <= n; ++j) {
    double s = 0.0;
    for (int r = 0; r < j; ++r) s += std::pow(phi, -r);
    z_ *= s;
  }
}

double MallowsModel::pmf_of_inversions(int inversions) const { return std::pow(phi_, -inversions) / z_; }

double MallowsModel::pmf(const Permutation& pi) const {
  if (pi.size() != n_) throw ArgumentError("permutation size does not match the model");
  return pmf_of_inversions(kendall_tau(pi, Permutation::identity(n_)));
}

void MallowsModel::sample_into(Rng& rng, std::vector<int>& order) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double q = 1.0 / phi_;
  const double log_q = std::log(q);
  order.clear();
  double q_pow = 1.0;
  for (int j = 1; j <= n_; ++j) {
    q_pow *= q;  // q^j
    const double t = unif(rng) * (1.0 - q_pow);
    auto r = static_cast<int>(std::floor(std::log1p(-t) / log_q));
    r = std::clamp(r, 0, j - 1);
    order.insert(order.end() - r, j);
  }
}

Permutation MallowsModel::sample(Rng& rng) const {
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n_));
  sample_into(rng, order);
  return Permutation(std::move(order));
}

double MallowsModel::block_first_choice(double phi, int m, int rank) {
  return (1.0 - 1.0 / phi) / (std::pow(phi, rank - 1) * (1.0 - std::pow(phi, -m)));
}

std::vector<double> MallowsModel::permutation_pmf() const {
  const PermutationTable& perms = PermutationTable::of_size(n_);
  std::vector<double> out(perms.count());
  for (std::size_t k = 0; k < perms.count(); ++k) out[k] = pmf_of_inversions(perms.inversions(k));
  return out;
}

const SurvivorTable& MallowsModel::survivor_table() const {
  std::call_once(cache_->once, [&] { cache_->table = std::make_unique<SurvivorTable>(permutation_pmf(), n_); });
  return *cache_->table;
}

double MallowsModel::first_choice(int i, CandidateSet removed) const {
  if (i < 1 || i > n_) throw ArgumentError("candidate index out of range");
  if (removed.contains(i)) throw ArgumentError("candidate " + std::to_string(i) + " is in the removed set");
  const std::uint32_t all = CandidateSet::all(n_).mask();
  if ((removed.mask() & ~all) != 0) throw ArgumentError("removed set refers to candidates beyond n");
  const std::uint32_t survivors = all & ~removed.mask();
  const int lo = std::countr_zero(survivors);
  const std::uint32_t shifted = survivors >> lo;
  if ((shifted & (shifted + 1)) == 0) {
    return block_first_choice(phi_, std::popcount(survivors), i - lo);
  }
  if (n_ > kMaxEnumerationSize) {
    throw UnsupportedError("non-contiguous survivor sets need enumeration (n <= " +
                           std::to_string(kMaxEnumerationSize) + ")");
  }
  return survivor_table().prob(removed.mask(), i);
}

std::vector<double> MallowsModel::first_choice_pmf(CandidateSet removed) const {
  std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
  for (int c = 1; c <= n_; ++c) {
    if (!removed.contains(c)) out[static_cast<std::size_t>(c - 1)] = first_choice(c, removed);
  }
  return out;
}

}  // namespace monoculture
