#include "monoculture/noise.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace monoculture {

double laplace_scale() { return 1.0 / std::numbers::sqrt2; }
double gumbel_scale() { return std::sqrt(6.0) / std::numbers::pi; }

NoiseSpec NoiseSpec::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw ArgumentError("discrete noise needs at least one atom");
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.value)) throw ArgumentError("discrete noise atoms must be finite");
    if (!(a.probability > 0.0)) throw ArgumentError("discrete noise probabilities must be positive");
    total += a.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ArgumentError("discrete noise probabilities must sum to 1 (got " + std::to_string(total) + ")");
  }
  return NoiseSpec(Kind::discrete, std::move(atoms));
}

NoiseSpec NoiseSpec::parse(const std::string& text) {
  if (text == "gaussian") return gaussian();
  if (text == "laplacian" || text == "laplace") return laplacian();
  if (text == "gumbel") return gumbel();
  const std::string prefix = "discrete:";
  if (text.rfind(prefix, 0) == 0) {
    std::vector<Atom> atoms;
    std::stringstream ss(text.substr(prefix.size()));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto at = item.find('@');
      if (at == std::string::npos) throw ArgumentError("discrete atom must be value@probability: " + item);
      try {
        atoms.push_back({std::stod(item.substr(0, at)), std::stod(item.substr(at + 1))});
      } catch (const std::logic_error&) {
        throw ArgumentError("bad discrete atom: " + item);
      }
    }
    return discrete(std::move(atoms));
  }
  throw ArgumentError("unknown noise kind: " + text);
}

void NoiseSpec::require_density() const {
  if (!has_density()) throw UnsupportedError("discrete noise has no density");
}

double NoiseSpec::log_density(double x) const {
  require_density();
  switch (kind_) {
    case Kind::gaussian:
      return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
    case Kind::laplacian: {
      const double b = laplace_scale();
      return -std::abs(x) / b - std::log(2.0 * b);
    }
    case Kind::gumbel: {
      const double beta = gumbel_scale();
      const double z = x / beta;
      return -(z + std::exp(-z)) - std::log(beta);
    }
    case Kind::discrete:
      break;
  }
  return 0.0;
}

double NoiseSpec::density(double x) const { return std::exp(log_density(x)); }

double NoiseSpec::cdf(double x) const {
  switch (kind_) {
    case Kind::gaussian:
      return 0.5 * std::erfc(-x / std::numbers::sqrt2);
    case Kind::laplacian: {
      const double b = laplace_scale();
      return x < 0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
    }
    case Kind::gumbel:
      return std::exp(-std::exp(-x / gumbel_scale()));
    case Kind::discrete: {
      double p = 0.0;
      for (const Atom& a : atoms_) {
        if (a.value <= x) p += a.probability;
      }
      return p;
    }
  }
  return 0.0;
}

double NoiseSpec::survival(double x) const {
  switch (kind_) {
    case Kind::gaussian:
    case Kind::laplacian:
      return cdf(-x);
    case Kind::gumbel:
      return -std::expm1(-std::exp(-x / gumbel_scale()));
    case Kind::discrete:
      break;
  }
  return 1.0 - cdf(x);
}

double NoiseSpec::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::gaussian:
      return std::normal_distribution<double>(0.0, 1.0)(rng);
    case Kind::laplacian: {
      const double e = std::exponential_distribution<double>(1.0)(rng);
      const bool neg = std::bernoulli_distribution(0.5)(rng);
      return (neg ? -e : e) * laplace_scale();
    }
    case Kind::gumbel:
      return std::extreme_value_distribution<double>(0.0, gumbel_scale())(rng);
    case Kind::discrete: {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      double acc = 0.0;
      for (const Atom& a : atoms_) {
        acc += a.probability;
        if (u < acc) return a.value;
      }
      return atoms_.back().value;
    }
  }
  return 0.0;
}

std::string NoiseSpec::name() const {
  switch (kind_) {
    case Kind::gaussian:
      return "gaussian";
    case Kind::laplacian:
      return "laplacian";
    case Kind::gumbel:
      return "gumbel";
    case Kind::discrete: {
      std::ostringstream os;
      os.precision(17);
      os << "discrete:";
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        os << (i ? "," : "") << atoms_[i].value << "@" << atoms_[i].probability;
      }
      return os.str();
    }
  }
  return "";
}

}  // namespace monoculture
