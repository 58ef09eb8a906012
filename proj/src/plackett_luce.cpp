#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "monoculture/models.hpp"

namespace monoculture {

double pl_pmf(double theta, const CandidatePool& pool, const Permutation& pi) {
  if (pi.size() != pool.size()) throw ArgumentError("permutation size does not match the pool");
  const int n = pool.size();
  // Log-sum-exp over the remaining candidates, from the back so each suffix sum is reused.
  double log_p = 0.0;
  double suffix_max = -INFINITY;
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) u[static_cast<std::size_t>(p)] = theta * pool.value(pi[p]);
  double suffix = 0.0;  // sum exp(u - suffix_max) over positions >= p
  for (int p = n - 1; p >= 0; --p) {
    const double up = u[static_cast<std::size_t>(p)];
    if (up > suffix_max) {
      suffix = suffix * std::exp(suffix_max - up) + 1.0;
      suffix_max = up;
    } else {
      suffix += std::exp(up - suffix_max);
    }
    log_p += up - (suffix_max + std::log(suffix));
  }
  return std::exp(log_p);
}

Permutation pl_sample(double theta, const CandidatePool& pool, Rng& rng) {
  const int n = pool.size();
  std::extreme_value_distribution<double> gumbel(0.0, 1.0);
  std::vector<double> keys(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) keys[static_cast<std::size_t>(i - 1)] = theta * pool.value(i) + gumbel(rng);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return keys[static_cast<std::size_t>(a - 1)] > keys[static_cast<std::size_t>(b - 1)];
  });
  return Permutation(std::move(order));
}

}  // namespace monoculture
