#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace monoculture::detail {

// Adaptive Gauss-Kronrod over [lo, hi] split at the given interior points
// (density kinks). Either end may be infinite.
template <class F>
double integrate_split(F f, double lo, double hi, std::vector<double> points) {
  using boost::math::quadrature::gauss_kronrod;
  std::sort(points.begin(), points.end());
  std::vector<double> edges{lo};
  for (double p : points) {
    if (p > edges.back() && p < hi) edges.push_back(p);
  }
  edges.push_back(hi);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    total += gauss_kronrod<double, 61>::integrate(f, edges[k], edges[k + 1], 20, 1e-13);
  }
  return total;
}

}  // namespace monoculture::detail
