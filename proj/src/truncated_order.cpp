#include <cmath>
#include <limits>
#include <numbers>

#include "monoculture/models.hpp"
#include "quadrature.hpp"

namespace monoculture {

namespace {

void check_pair(double xi, double xj, double theta) {
  if (!(xi > xj)) throw ArgumentError("truncated order probability needs xi > xj");
  if (!(theta > 0.0)) throw ArgumentError("theta must be positive");
}

}  // namespace

double conditional_order_probability_quadrature(const NoiseSpec& noise, double xi, double xj, double theta,
                                                double a) {
  check_pair(xi, xj, theta);
  if (!noise.has_density()) throw UnsupportedError("truncated order probability needs a noise density");
  const double fi_a = noise.cdf(theta * (a - xi));
  const double fj_a = noise.cdf(theta * (a - xj));
  const double den = fi_a * fj_a;
  if (!(den > 0.0)) throw NumericalError("truncation point is too far in the lower tail");
  auto integrand = [&](double y) {
    return theta * noise.density(theta * (y - xj)) * (fi_a - noise.cdf(theta * (y - xi)));
  };
  const double num = detail::integrate_split(integrand, -std::numeric_limits<double>::infinity(), a, {xi, xj});
  return num / den;
}

double conditional_order_probability(const NoiseSpec& noise, double xi, double xj, double theta, double a) {
  check_pair(xi, xj, theta);
  switch (noise.kind()) {
    case NoiseSpec::Kind::gaussian:
      return conditional_order_probability_quadrature(noise, xi, xj, theta, a);
    case NoiseSpec::Kind::laplacian: {
      const double lambda = theta / laplace_scale();
      if (a <= xj) return 0.5;
      if (a <= xi) {
        const double t = lambda * (a - xj);
        return 1.0 - (0.5 + t) / (2.0 * std::exp(t) - 1.0);
      }
      const double delta = xi - xj;
      const double ei = std::exp(-lambda * (a - xi));
      const double ej = std::exp(-lambda * (a - xj));
      const double num = 1.0 - (0.5 + lambda * delta / 4.0) * std::exp(-lambda * delta) - 0.5 * ei + ei * ej / 8.0;
      const double den = 1.0 - 0.5 * ei - 0.5 * ej + ei * ej / 4.0;
      return num / den;
    }
    case NoiseSpec::Kind::gumbel:
    case NoiseSpec::Kind::discrete:
      break;
  }
  throw UnsupportedError("truncated order probability supports gaussian and laplacian noise only");
}

double order_probability(const NoiseSpec& noise, double xi, double xj, double theta) {
  check_pair(xi, xj, theta);
  const double delta = xi - xj;
  switch (noise.kind()) {
    case NoiseSpec::Kind::gaussian:
      return 0.5 * std::erfc(-theta * delta / 2.0);  // Phi(theta delta / sqrt 2)
    case NoiseSpec::Kind::laplacian: {
      const double lambda = theta / laplace_scale();
      return 1.0 - (0.5 + lambda * delta / 4.0) * std::exp(-lambda * delta);
    }
    case NoiseSpec::Kind::gumbel: {
      auto integrand = [&](double y) {
        return theta * noise.density(theta * (y - xj)) * noise.survival(theta * (y - xi));
      };
      const double inf = std::numeric_limits<double>::infinity();
      return detail::integrate_split(integrand, -inf, inf, {xi, xj});
    }
    case NoiseSpec::Kind::discrete:
      break;
  }
  throw UnsupportedError("order probability needs a noise density");
}

double well_ordered_margin(const NoiseSpec& noise, double a, double b, double c, double d) {
  if (!(a > b) || !(c > d)) throw ArgumentError("well-ordered check needs a > b and c > d");
  return noise.log_density(a - c) + noise.log_density(b - d) - noise.log_density(a - d) -
         noise.log_density(b - c);
}

bool well_ordered_check(const NoiseSpec& noise, double a, double b, double c, double d) {
  // Margins within rounding of zero are ties, not strict inequalities.
  const double scale = std::abs(noise.log_density(a - c)) + std::abs(noise.log_density(b - d)) +
                       std::abs(noise.log_density(a - d)) + std::abs(noise.log_density(b - c));
  return well_ordered_margin(noise, a, b, c, d) > 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace monoculture
