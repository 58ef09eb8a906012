#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "monoculture/models.hpp"
#include "quadrature.hpp"

namespace monoculture {

namespace {

std::vector<double> pl_table(double theta, const CandidatePool& pool) {
  const PermutationTable& perms = PermutationTable::of_size(pool.size());
  std::vector<double> out(perms.count());
  for (std::size_t k = 0; k < perms.count(); ++k) out[k] = pl_pmf(theta, pool, perms.permutation(k));
  return out;
}

std::vector<double> discrete_rum_table(const NoiseSpec& noise, double theta, const CandidatePool& pool) {
  const int n = pool.size();
  const auto& atoms = noise.atoms();
  const std::size_t m = atoms.size();
  const PermutationTable& perms = PermutationTable::of_size(n);
  std::vector<double> out(perms.count(), 0.0);
  std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
  std::vector<double> keys(static_cast<std::size_t>(n));
  std::vector<int> order(static_cast<std::size_t>(n));
  for (;;) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      const auto& a = atoms[digit[static_cast<std::size_t>(i)]];
      w *= a.probability;
      keys[static_cast<std::size_t>(i)] = pool.value(i + 1) + a.value / theta;
    }
    std::iota(order.begin(), order.end(), 1);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return keys[static_cast<std::size_t>(a - 1)] > keys[static_cast<std::size_t>(b - 1)];
    });
    for (int p = 1; p < n; ++p) {
      const int a = order[static_cast<std::size_t>(p - 1)];
      const int b = order[static_cast<std::size_t>(p)];
      if (keys[static_cast<std::size_t>(a - 1)] == keys[static_cast<std::size_t>(b - 1)]) {
        throw TieError(std::min(a, b), std::max(a, b));
      }
    }
    out[perms.index_of(Permutation(order))] += w;
    int i = 0;
    while (i < n && ++digit[static_cast<std::size_t>(i)] == m) digit[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  return out;
}

// n <= 3 continuous RUM: Pr[a > b > c] = int f_b(y) (1 - F_a(y)) F_c(y) dy.
std::vector<double> continuous_rum_table(const NoiseSpec& noise, double theta, const CandidatePool& pool) {
  const int n = pool.size();
  const PermutationTable& perms = PermutationTable::of_size(n);
  std::vector<double> points(pool.values().begin(), pool.values().end());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> out(perms.count());
  for (std::size_t k = 0; k < perms.count(); ++k) {
    auto row = perms.row(k);
    const double xa = pool.value(row[0]);
    const double xb = pool.value(row[1]);
    const double xc = n == 3 ? pool.value(row[2]) : 0.0;
    auto integrand = [&](double y) {
      double v = theta * noise.density(theta * (y - xb)) * noise.survival(theta * (y - xa));
      if (n == 3) v *= noise.cdf(theta * (y - xc));
      return v;
    };
    out[k] = detail::integrate_split(integrand, -inf, inf, points);
  }
  return out;
}

}  // namespace

std::vector<double> permutation_pmf(const RankingModelSpec& spec, const CandidatePool& pool) {
  const Family& family = spec.family();
  const int n = pool.size();
  if (!family.exact_available(n)) {
    throw UnsupportedError("no exact pmf for " + family.name() + " with n = " + std::to_string(n) +
                           "; use the Monte Carlo estimators");
  }
  switch (family.kind()) {
    case Family::Kind::mallows:
      return MallowsModel(spec.phi(), n).permutation_pmf();
    case Family::Kind::plackett_luce:
      return pl_table(spec.theta(), pool);
    case Family::Kind::rum: {
      const NoiseSpec& noise = family.noise();
      switch (noise.kind()) {
        case NoiseSpec::Kind::gumbel:
          return pl_table(spec.theta() * std::numbers::pi / std::sqrt(6.0), pool);
        case NoiseSpec::Kind::discrete:
          return discrete_rum_table(noise, spec.theta(), pool);
        case NoiseSpec::Kind::gaussian:
        case NoiseSpec::Kind::laplacian:
          return continuous_rum_table(noise, spec.theta(), pool);
      }
    }
  }
  throw UnsupportedError("no exact pmf for " + family.name());
}

}  // namespace monoculture
