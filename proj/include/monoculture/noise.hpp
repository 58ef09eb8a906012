#pragma once

// Noise distributions for random utility models. Continuous kinds have unit
// variance; a model with accuracy theta adds eps / theta to each value.

#include <string>
#include <vector>

#include "monoculture/core.hpp"

namespace monoculture {

class NoiseSpec {
 public:
  enum class Kind { gaussian, laplacian, gumbel, discrete };

  struct Atom {
    double value;
    double probability;
  };

  static NoiseSpec gaussian() { return NoiseSpec(Kind::gaussian, {}); }
  /// Laplace with scale 1/sqrt(2).
  static NoiseSpec laplacian() { return NoiseSpec(Kind::laplacian, {}); }
  /// Max-Gumbel with scale sqrt(6)/pi. Ranking by x + eps/theta is then
  /// Plackett-Luce with parameter theta * pi / sqrt(6).
  static NoiseSpec gumbel() { return NoiseSpec(Kind::gumbel, {}); }
  /// Finite support; probabilities must be positive and sum to 1 within 1e-12.
  /// Atoms are used as given (no variance normalization).
  static NoiseSpec discrete(std::vector<Atom> atoms);

  /// Parses "gaussian", "laplacian", "gumbel" or "discrete:v1@p1,v2@p2,...".
  static NoiseSpec parse(const std::string& text);

  Kind kind() const { return kind_; }
  bool has_density() const { return kind_ != Kind::discrete; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  double density(double x) const;
  double log_density(double x) const;
  double cdf(double x) const;
  /// 1 - cdf(x), computed without cancellation.
  double survival(double x) const;
  double sample(Rng& rng) const;

  std::string name() const;

 private:
  NoiseSpec(Kind kind, std::vector<Atom> atoms) : kind_(kind), atoms_(std::move(atoms)) {}
  void require_density() const;

  Kind kind_;
  std::vector<Atom> atoms_;
};

/// Laplace scale b of the unit-variance Laplace noise.
double laplace_scale();
/// Gumbel scale beta of the unit-variance Gumbel noise.
double gumbel_scale();

}  // namespace monoculture
