#include <cmath>
#include <map>

#include "doctest.h"
#include "monoculture/models.hpp"
#include "oracles.hpp"

using namespace monoculture;

namespace {

std::vector<double> values_of(const CandidatePool& pool) { return {pool.values().begin(), pool.values().end()}; }

oracle::Perm as_perm(std::span<const std::uint8_t> row) { return {row.begin(), row.end()}; }

// Max abs difference between a library pmf over PermutationTable rows and an oracle pmf.
double pmf_gap(const std::vector<double>& pmf, const oracle::Pmf& ref, int n) {
  const PermutationTable& t = PermutationTable::of_size(n);
  double worst = 0;
  for (std::size_t k = 0; k < t.count(); ++k) {
    const auto it = ref.find(as_perm(t.row(k)));
    worst = std::max(worst, std::abs(pmf[k] - (it == ref.end() ? 0.0 : it->second)));
  }
  return worst;
}

}  // namespace

TEST_CASE("family parsing and exact availability") {
  CHECK(Family::parse("mallows").is_mallows());
  CHECK(Family::parse("pl").is_plackett_luce());
  CHECK(Family::parse("plackett-luce").is_plackett_luce());
  CHECK(Family::parse("rum", "laplacian").noise().kind() == NoiseSpec::Kind::laplacian);
  CHECK_THROWS_AS(Family::parse("borda"), ArgumentError);
  CHECK_THROWS_AS(Family::mallows().noise(), ArgumentError);
  CHECK(Family::rum(NoiseSpec::gaussian()).exact_available(3));
  CHECK_FALSE(Family::rum(NoiseSpec::gaussian()).exact_available(4));
  CHECK(Family::mallows().exact_available(8));
  CHECK_FALSE(Family::mallows().exact_available(9));
}

TEST_CASE("accuracy parameter validation") {
  CHECK_THROWS_AS(RankingModelSpec(Family::mallows(), 0.0), ArgumentError);
  CHECK_THROWS_AS(RankingModelSpec(Family::rum(NoiseSpec::gaussian()), -1.0), ArgumentError);
  CHECK_NOTHROW(RankingModelSpec(Family::plackett_luce(), 0.0));
  CHECK(RankingModelSpec::mallows_phi(2.5).theta() == doctest::Approx(1.5));
}

TEST_CASE("Mallows normalizer and pmf against enumeration") {
  for (double phi : {1.1, 2.0, 5.0}) {
    for (int n = 1; n <= 7; ++n) {
      const MallowsModel m(phi, n);
      const oracle::Pmf ref = oracle::mallows(phi, n);
      double z = 0;
      for (const auto& p : oracle::permutations(n)) z += std::pow(phi, -oracle::inversions(p));
      CHECK(m.normalizer() == doctest::Approx(z).epsilon(1e-12));
      const auto pmf = m.permutation_pmf();
      double total = 0;
      for (double p : pmf) total += p;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(pmf_gap(pmf, ref, n) < 1e-14);
    }
  }
}

TEST_CASE("Mallows first-choice examples") {
  const MallowsModel m(2.0, 3);
  CHECK(m.first_choice(1) == doctest::Approx(4.0 / 7));
  CHECK(m.first_choice(3) == doctest::Approx(1.0 / 7));
  CHECK(m.first_choice(2, {1}) == doctest::Approx(2.0 / 3));
  CHECK(MallowsModel::block_first_choice(2.0, 3, 2) == doctest::Approx(2.0 / 7));
}

TEST_CASE("Mallows first choice after any removal matches enumeration") {
  for (double phi : {1.1, 2.0, 5.0}) {
    for (int n = 2; n <= 6; ++n) {
      const MallowsModel m(phi, n);
      const oracle::Pmf ref = oracle::mallows(phi, n);
      for (std::uint32_t mask = 0; mask + 1 < (1u << n); ++mask) {
        std::vector<int> taken;
        for (int c = 1; c <= n; ++c)
          if ((mask >> (c - 1)) & 1u) taken.push_back(c);
        std::vector<double> expect(static_cast<std::size_t>(n), 0.0);
        for (const auto& [p, w] : ref) expect[static_cast<std::size_t>(oracle::first_not_taken(p, taken) - 1)] += w;
        const auto got = m.first_choice_pmf(CandidateSet::from_mask(mask));
        for (int c = 1; c <= n; ++c) CHECK(std::abs(got[c - 1] - expect[c - 1]) < 1e-13);
        const SurvivorTable& st = m.survivor_table();
        for (int c = 1; c <= n; ++c) CHECK(std::abs(st.prob(mask, c) - expect[c - 1]) < 1e-13);
      }
    }
  }
}

TEST_CASE("Mallows projection holds exactly when the survivors are contiguous") {
  // Restrict the enumerated ranking to the survivors and compare with Mallows
  // on the survivors with the same phi.
  const double phi = 2.0;
  for (int n = 3; n <= 6; ++n) {
    const oracle::Pmf ref = oracle::mallows(phi, n);
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
      const CandidateSet removed = CandidateSet::from_mask(mask);
      if (removed.size() > 2 || n - removed.size() < 2) continue;
      std::vector<int> survivors;
      for (int c = 1; c <= n; ++c)
        if (!removed.contains(c)) survivors.push_back(c);
      const int m = static_cast<int>(survivors.size());
      std::map<oracle::Perm, double> restricted;
      for (const auto& [p, w] : ref) {
        oracle::Perm r;
        for (int c : p) {
          const auto it = std::find(survivors.begin(), survivors.end(), c);
          if (it != survivors.end()) r.push_back(static_cast<int>(it - survivors.begin()) + 1);
        }
        restricted[r] += w;
      }
      const oracle::Pmf sub = oracle::mallows(phi, m);
      double tv = 0;
      for (const auto& [r, w] : restricted) tv += std::abs(w - sub.at(r));
      tv /= 2;
      const bool contiguous = survivors.back() - survivors.front() + 1 == m;
      CAPTURE(n);
      CAPTURE(mask);
      if (contiguous) {
        CHECK(tv < 1e-12);
      } else {
        CHECK(tv > 1e-3);
      }
    }
  }
  // n = 3, S = {2}: Pr[1 before 3] / Pr[3 before 1] is 3.2, not phi.
  const MallowsModel m(2.0, 3);
  const double p1 = m.first_choice(1, {2});
  CHECK(p1 / (1 - p1) == doctest::Approx(3.2));
}

TEST_CASE("Mallows top-two ratio equals phi") {
  for (double phi : {1.1, 2.0, 5.0}) {
    for (int n = 2; n <= 6; ++n) {
      std::map<std::pair<int, int>, double> top2;
      for (const auto& [p, w] : oracle::mallows(phi, n)) top2[{p[0], p[1]}] += w;
      for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) CHECK(top2[{i, j}] / top2[{j, i}] == doctest::Approx(phi).epsilon(1e-12));
    }
  }
}

TEST_CASE("Mallows sampler matches the pmf") {
  const MallowsModel m(1.7, 4);
  const auto pmf = m.permutation_pmf();
  const PermutationTable& t = PermutationTable::of_size(4);
  std::vector<double> counts(t.count(), 0.0);
  Rng rng(123);
  const int n = 1'000'000;
  std::vector<int> order;
  for (int i = 0; i < n; ++i) {
    m.sample_into(rng, order);
    counts[t.index_of(Permutation(order))] += 1;
  }
  double tv = 0;
  for (std::size_t k = 0; k < t.count(); ++k) tv += std::abs(counts[k] / n - pmf[k]);
  CHECK(tv / 2 < 0.005);
}

TEST_CASE("Plackett-Luce pmf against the sequential-choice oracle") {
  const CandidatePool pool({1.2, 0.7, 0.1, -0.4});
  for (double theta : {0.0, 0.5, 2.0}) {
    const auto ref = oracle::luce(theta, values_of(pool));
    CHECK(pmf_gap(permutation_pmf(RankingModelSpec(Family::plackett_luce(), theta), pool), ref, 4) < 1e-14);
    for (const auto& [p, w] : ref) CHECK(pl_pmf(theta, pool, Permutation(p)) == doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("Gumbel RUM sampling matches Plackett-Luce at theta pi / sqrt 6") {
  const CandidatePool pool({1.0, 0.4, 0.0});
  const double theta = 1.3;
  const auto ref = oracle::luce(theta * M_PI / std::sqrt(6.0), values_of(pool));
  const PermutationTable& t = PermutationTable::of_size(3);
  std::vector<double> counts(t.count(), 0.0);
  Rng rng(77);
  const int n = 1'000'000;
  const NoiseSpec gumbel = NoiseSpec::gumbel();
  for (int i = 0; i < n; ++i) counts[t.index_of(rum_sample(gumbel, theta, pool, rng))] += 1;
  for (std::size_t k = 0; k < t.count(); ++k) {
    const double p = ref.at(as_perm(t.row(k)));
    CHECK(std::abs(counts[k] / n - p) < 4 * std::sqrt(p * (1 - p) / n));
  }
  // And the exact Gumbel pmf is the Plackett-Luce one.
  CHECK(pmf_gap(permutation_pmf(RankingModelSpec(Family::rum(gumbel), theta), pool), ref, 3) < 1e-12);
}

TEST_CASE("Plackett-Luce sampler matches the pmf") {
  const CandidatePool pool({1.0, 0.4, 0.0});
  const auto ref = oracle::luce(0.8, values_of(pool));
  const PermutationTable& t = PermutationTable::of_size(3);
  std::vector<double> counts(t.count(), 0.0);
  Rng rng(3);
  const int n = 400'000;
  for (int i = 0; i < n; ++i) counts[t.index_of(pl_sample(0.8, pool, rng))] += 1;
  for (std::size_t k = 0; k < t.count(); ++k) {
    const double p = ref.at(as_perm(t.row(k)));
    CHECK(std::abs(counts[k] / n - p) < 4 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("discrete RUM pmf by atom enumeration") {
  const std::vector<std::pair<double, double>> atoms = {{1, 0.05}, {0, 0.9}, {-1, 0.05}};
  const NoiseSpec noise = NoiseSpec::discrete({{1, 0.05}, {0, 0.9}, {-1, 0.05}});
  const CandidatePool pool({1.75, 0.5, 0});
  const auto ref = oracle::discrete_rum(atoms, 1.0, values_of(pool));
  CHECK(pmf_gap(permutation_pmf(RankingModelSpec(Family::rum(noise), 1.0), pool), ref, 3) < 1e-15);
  // Ties are reported rather than broken silently.
  CHECK_THROWS_AS(permutation_pmf(RankingModelSpec(Family::rum(noise), 1.0), CandidatePool({1, 0, -0.5})), TieError);
}

TEST_CASE("continuous RUM pmf for n <= 3 matches simulation") {
  const CandidatePool pool({1.0, 0.5, 0.0});
  for (const NoiseSpec& noise : {NoiseSpec::gaussian(), NoiseSpec::laplacian()}) {
    const RankingModelSpec spec(Family::rum(noise), 1.2);
    const auto pmf = permutation_pmf(spec, pool);
    const PermutationTable& t = PermutationTable::of_size(3);
    std::vector<double> counts(t.count(), 0.0);
    Rng rng(21);
    const int n = 500'000;
    const RankingSampler sampler(spec, 3);
    for (int i = 0; i < n; ++i) counts[t.index_of(sampler.sample(pool, rng))] += 1;
    for (std::size_t k = 0; k < t.count(); ++k) {
      CHECK(std::abs(counts[k] / n - pmf[k]) < 4 * std::sqrt(pmf[k] * (1 - pmf[k]) / n));
    }
  }
  // n = 2 Gaussian: Pr[correct] = Phi(theta (x1 - x2) / sqrt 2).
  const auto two = permutation_pmf(RankingModelSpec(Family::rum(NoiseSpec::gaussian()), 2.0), CandidatePool({1, 0.25}));
  CHECK(two[0] == doctest::Approx(0.5 * std::erfc(-2.0 * 0.75 / 2.0)).epsilon(1e-10));
  CHECK_THROWS_AS(permutation_pmf(RankingModelSpec(Family::rum(NoiseSpec::gaussian()), 1.0),
                                  CandidatePool({3, 2, 1, 0})),
                  UnsupportedError);
}

TEST_CASE("truncated order probability") {
  const NoiseSpec lap = NoiseSpec::laplacian();
  const NoiseSpec gauss = NoiseSpec::gaussian();
  CHECK(conditional_order_probability(lap, 1.0, 0.0, 1.0, -0.5) == 0.5);
  CHECK(conditional_order_probability(lap, 1.0, 0.0, 1.0, 0.0) == 0.5);
  for (double theta : {0.3, 1.0, 2.5}) {
    for (double a = -1.0; a <= 4.0; a += 0.25) {
      CHECK(conditional_order_probability(lap, 1.0, 0.0, theta, a) ==
            doctest::Approx(conditional_order_probability_quadrature(lap, 1.0, 0.0, theta, a)).epsilon(1e-10));
    }
    // Large a recovers the unconditional probability.
    for (const NoiseSpec* noise : {&lap, &gauss}) {
      CHECK(conditional_order_probability(*noise, 1.0, 0.0, theta, 60.0 / theta) ==
            doctest::Approx(order_probability(*noise, 1.0, 0.0, theta)).epsilon(1e-9));
    }
  }
  CHECK(order_probability(gauss, 1.0, 0.0, 1.0) == doctest::Approx(0.5 * std::erfc(-0.5)));
  CHECK_THROWS_AS(conditional_order_probability(lap, 0.0, 1.0, 1.0, 0.0), ArgumentError);
}

TEST_CASE("well-ordered densities") {
  const NoiseSpec gauss = NoiseSpec::gaussian();
  const NoiseSpec lap = NoiseSpec::laplacian();
  CHECK(well_ordered_check(gauss, 2, 1, 1, 0));
  // Gaussian log margin is (a - b)(c - d) for unit variance.
  CHECK(well_ordered_margin(gauss, 2, 1, 1.5, 0) == doctest::Approx(1.5));
  // Laplace: strict when the intervals interleave, an exact tie otherwise.
  CHECK(well_ordered_check(lap, 2, 0.5, 1, 0));
  CHECK(well_ordered_check(lap, 3, 0, 2, 1));
  CHECK_FALSE(well_ordered_check(lap, 3, 2, 1, 0));
  CHECK(std::abs(well_ordered_margin(lap, 3, 2, 1, 0)) < 1e-12);
}
