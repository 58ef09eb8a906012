#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "monoculture/models.hpp"

namespace monoculture {

Family Family::parse(const std::string& family, const std::string& noise) {
  if (family == "mallows") return mallows();
  if (family == "plackett-luce" || family == "pl") return plackett_luce();
  if (family == "rum") return rum(NoiseSpec::parse(noise));
  throw ArgumentError("unknown family: " + family + " (expected mallows, rum or plackett-luce)");
}

const NoiseSpec& Family::noise() const {
  if (!is_rum()) throw ArgumentError(name() + " has no noise distribution");
  return noise_;
}

bool Family::exact_available(int n) const {
  if (n < 2 || n > kMaxEnumerationSize) return false;
  switch (kind_) {
    case Kind::mallows:
    case Kind::plackett_luce:
      return true;
    case Kind::rum:
      switch (noise_.kind()) {
        case NoiseSpec::Kind::gumbel:
          return true;
        case NoiseSpec::Kind::discrete:
          return std::pow(static_cast<double>(noise_.atoms().size()), n) <= 1e7;
        case NoiseSpec::Kind::gaussian:
        case NoiseSpec::Kind::laplacian:
          return n <= 3;
      }
  }
  return false;
}

std::string Family::name() const {
  switch (kind_) {
    case Kind::mallows:
      return "mallows";
    case Kind::plackett_luce:
      return "plackett-luce";
    case Kind::rum:
      return "rum-" + noise_.name();
  }
  return "";
}

RankingModelSpec::RankingModelSpec(Family family, double theta) : family_(std::move(family)), theta_(theta) {
  if (!std::isfinite(theta)) throw ArgumentError("theta must be finite");
  // theta = 0 is allowed for Plackett-Luce as the uniform limit.
  const bool ok = family_.is_plackett_luce() ? theta >= 0.0 : theta > 0.0;
  if (!ok) throw ArgumentError("theta must be positive (phi > 1 for Mallows)");
}

std::string RankingModelSpec::name() const {
  std::ostringstream os;
  os.precision(17);
  os << family_.name() << "(theta=" << theta_ << ")";
  return os.str();
}

TieError::TieError(int a, int b)
    : NumericalError("perturbed values of candidates " + std::to_string(a) + " and " + std::to_string(b) +
                     " coincide"),
      first(a),
      second(b) {}

namespace {

// Sorts candidate indices by key, best first. Rejects exact ties when asked.
void order_by_keys(const std::vector<double>& keys, std::vector<int>& order, bool reject_ties) {
  order.resize(keys.size());
  std::iota(order.begin(), order.end(), 1);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return keys[static_cast<std::size_t>(a - 1)] > keys[static_cast<std::size_t>(b - 1)];
  });
  if (!reject_ties) return;
  for (std::size_t p = 1; p < order.size(); ++p) {
    const int a = order[p - 1];
    const int b = order[p];
    if (keys[static_cast<std::size_t>(a - 1)] == keys[static_cast<std::size_t>(b - 1)]) {
      throw TieError(std::min(a, b), std::max(a, b));
    }
  }
}

}  // namespace

Permutation rum_sample(const NoiseSpec& noise, double theta, const CandidatePool& pool, Rng& rng) {
  RankingSampler sampler(RankingModelSpec(Family::rum(noise), theta), pool.size());
  return sampler.sample(pool, rng);
}

RankingSampler::RankingSampler(const RankingModelSpec& spec, int n) : spec_(spec), n_(n) {
  if (spec.family().is_mallows()) mallows_ = std::make_shared<MallowsModel>(spec.phi(), n);
}

void RankingSampler::sample_into(const CandidatePool& pool, Rng& rng, std::vector<int>& order) const {
  if (pool.size() != n_) throw ArgumentError("pool size does not match the sampler");
  if (mallows_) {
    mallows_->sample_into(rng, order);
    return;
  }
  thread_local std::vector<double> keys;
  keys.resize(static_cast<std::size_t>(n_));
  const double theta = spec_.theta();
  if (spec_.family().is_plackett_luce()) {
    std::extreme_value_distribution<double> gumbel(0.0, 1.0);
    for (int i = 1; i <= n_; ++i) keys[static_cast<std::size_t>(i - 1)] = theta * pool.value(i) + gumbel(rng);
    order_by_keys(keys, order, false);
    return;
  }
  const NoiseSpec& noise = spec_.family().noise();
  for (int i = 1; i <= n_; ++i) keys[static_cast<std::size_t>(i - 1)] = pool.value(i) + noise.sample(rng) / theta;
  order_by_keys(keys, order, noise.kind() == NoiseSpec::Kind::discrete);
}

Permutation RankingSampler::sample(const CandidatePool& pool, Rng& rng) const {
  std::vector<int> order;
  sample_into(pool, rng, order);
  return Permutation(std::move(order));
}

}  // namespace monoculture
