#include <atomic>
#include <cmath>

#include "doctest.h"
#include "monoculture/core.hpp"
#include "monoculture/noise.hpp"
#include "monoculture/parallel.hpp"
#include "oracles.hpp"

using namespace monoculture;

TEST_CASE("candidate sets are bitmasks over 1-based indices") {
  CandidateSet s{1, 3};
  CHECK(s.contains(1));
  CHECK_FALSE(s.contains(2));
  CHECK(s.size() == 2);
  CHECK(s.mask() == 0b101u);
  CHECK(s.with(2) == CandidateSet::all(3));
  CHECK(s.members() == std::vector<int>{1, 3});
  CHECK_THROWS_AS(s.insert(0), ArgumentError);
}

TEST_CASE("pools must be strictly decreasing and finite") {
  CHECK_NOTHROW(CandidatePool({1, 0.5, 0}));
  CHECK_THROWS_AS(CandidatePool({1, 1, 0}), ArgumentError);
  CHECK_THROWS_AS(CandidatePool({0, 1}), ArgumentError);
  CHECK_THROWS_AS(CandidatePool({1}), ArgumentError);
  CHECK_THROWS_AS(CandidatePool({NAN, 0}), ArgumentError);
}

TEST_CASE("permutations and Kendall tau") {
  CHECK_THROWS_AS(Permutation({1, 1, 2}), ArgumentError);
  CHECK_THROWS_AS(Permutation({1, 4, 2}), ArgumentError);
  const Permutation id = Permutation::identity(4);
  const Permutation rev({4, 3, 2, 1});
  CHECK(kendall_tau(id, rev) == 6);
  CHECK(kendall_tau(rev, rev) == 0);
  CHECK(rev.to_string() == "(4,3,2,1)");

  // Metric properties over all of S_4.
  const auto perms = oracle::permutations(4);
  for (const auto& a : perms) {
    const Permutation pa(a);
    CHECK(kendall_tau(id, pa) == oracle::inversions(a));
    for (std::size_t j = 0; j < perms.size(); j += 5) {
      const Permutation pb(perms[j]);
      CHECK(kendall_tau(pa, pb) == kendall_tau(pb, pa));
      CHECK(kendall_tau(pa, pb) <= kendall_tau(pa, id) + kendall_tau(id, pb));
    }
  }
}

TEST_CASE("removing candidates keeps the relative order") {
  const Permutation pi({3, 1, 4, 2});
  const PartialRanking r = remove_candidates(pi, {3, 4});
  CHECK(r.order == std::vector<int>{1, 2});
  CHECK(r.top() == 1);
  const CandidatePool pool({4, 3, 2, 1});
  CHECK(top_value(r, pool) == 4);
  CHECK_THROWS_AS(remove_candidates(pi, CandidateSet::all(4)), ArgumentError);
}

TEST_CASE("permutation table is lexicographic with correct inversions") {
  for (int n = 1; n <= 6; ++n) {
    const PermutationTable& t = PermutationTable::of_size(n);
    const auto perms = oracle::permutations(n);
    REQUIRE(t.count() == perms.size());
    for (std::size_t k = 0; k < t.count(); ++k) {
      const Permutation p = t.permutation(k);
      CHECK(std::vector<int>(p.order().begin(), p.order().end()) == perms[k]);
      CHECK(t.inversions(k) == oracle::inversions(perms[k]));
      CHECK(t.index_of(p) == k);
      if (n >= 2) CHECK(first_surviving(t.row(k), 1u) == (perms[k][0] == 1 ? perms[k][1] : perms[k][0]));
    }
  }
  CHECK_THROWS_AS(PermutationTable::of_size(kMaxEnumerationSize + 1), UnsupportedError);
}

TEST_CASE("uniform order statistic means") {
  CHECK(uniform_order_statistic_means(4, 0, 1) == std::vector<double>{0.8, 0.6, 0.4, 0.2});
  // Against sampled pools.
  const auto dist = CandidateDistribution::uniform(-1, 2, 5);
  const auto expected = dist.expected_order_statistics();
  Rng rng(5);
  std::vector<double> sum(5, 0.0), sq(5, 0.0);
  const int trials = 200'000;
  for (int t = 0; t < trials; ++t) {
    const CandidatePool p = dist.sample(rng);
    for (int i = 1; i <= 5; ++i) {
      sum[i - 1] += p.value(i);
      sq[i - 1] += p.value(i) * p.value(i);
    }
  }
  for (std::size_t i = 0; i < 5; ++i) {
    const double mean = sum[i] / trials;
    const double se = std::sqrt((sq[i] / trials - mean * mean) / trials);
    CHECK(std::abs(mean - expected[i]) < 4 * se);
  }
}

TEST_CASE("candidate distributions") {
  const auto fixed = CandidateDistribution::fixed(CandidatePool({2, 1}));
  CHECK(fixed.is_fixed());
  CHECK(fixed.describe() == "pool:2,1");
  Rng rng(1);
  CHECK(fixed.sample(rng).value(1) == 2);
  const auto unit = CandidateDistribution::unit_variance_uniform(3);
  CHECK(unit.hi() == doctest::Approx(std::sqrt(3.0)));
  CHECK((unit.hi() - unit.lo()) * (unit.hi() - unit.lo()) / 12 == doctest::Approx(1.0));
  CHECK_THROWS_AS(unit.pool(), ArgumentError);
  CHECK_THROWS_AS(CandidateDistribution::uniform(1, 0, 3), ArgumentError);
  CHECK_THROWS_AS(CandidateDistribution::uniform(0, 1, 1), ArgumentError);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  for (int threads : {1, 3}) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, threads,
                                 [](std::size_t i) {
                                   if (i == 7) throw NumericalError("boom");
                                 }),
                    NumericalError);
  }
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("streams are deterministic and distinct") {
  CHECK(make_stream(1, 2, 3)() == make_stream(1, 2, 3)());
  CHECK(make_stream(1, 2, 3)() != make_stream(1, 2, 4)());
  CHECK(make_stream(1, 2)() != make_stream(2, 2)());
}

TEST_CASE("compensated sum recovers small terms") {
  CompensatedSum s;
  s += 1e16;
  for (int i = 0; i < 1000; ++i) s += 1.0;
  s += -1e16;
  CHECK(s.value() == 1000.0);
}

namespace {

// Trapezoid integral of g over [-40, 40].
template <class G>
double integrate(G g) {
  const int steps = 400'000;
  const double h = 80.0 / steps;
  double sum = 0.5 * (g(-40.0) + g(40.0));
  for (int i = 1; i < steps; ++i) sum += g(-40.0 + i * h);
  return sum * h;
}

}  // namespace

TEST_CASE("continuous noise has unit variance and consistent cdf") {
  for (const NoiseSpec& noise : {NoiseSpec::gaussian(), NoiseSpec::laplacian(), NoiseSpec::gumbel()}) {
    CAPTURE(noise.name());
    const double mass = integrate([&](double x) { return noise.density(x); });
    const double mean = integrate([&](double x) { return x * noise.density(x); });
    const double var = integrate([&](double x) { return (x - mean) * (x - mean) * noise.density(x); });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
    // Away from 0, where the Laplace density has a kink.
    for (double x : {-2.5, -0.3, 0.2, 0.7, 3.0}) {
      CHECK(noise.cdf(x) + noise.survival(x) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::exp(noise.log_density(x)) == doctest::Approx(noise.density(x)).epsilon(1e-12));
      const double h = 1e-5;
      CHECK((noise.cdf(x + h) - noise.cdf(x - h)) / (2 * h) == doctest::Approx(noise.density(x)).epsilon(1e-6));
    }
  }
  CHECK(laplace_scale() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(gumbel_scale() == doctest::Approx(std::sqrt(6.0) / M_PI));
}

TEST_CASE("noise sampling matches the first two moments") {
  Rng rng(9);
  for (const NoiseSpec& noise : {NoiseSpec::gaussian(), NoiseSpec::laplacian(), NoiseSpec::gumbel()}) {
    const double mean = integrate([&](double x) { return x * noise.density(x); });
    double s = 0, s2 = 0;
    const int n = 400'000;
    for (int i = 0; i < n; ++i) {
      const double x = noise.sample(rng);
      s += x;
      s2 += x * x;
    }
    CHECK(std::abs(s / n - mean) < 4 / std::sqrt(n));
    CHECK(s2 / n - (s / n) * (s / n) == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("discrete noise parsing and validation") {
  const NoiseSpec d = NoiseSpec::parse("discrete:1@0.25,0@0.5,-1@0.25");
  REQUIRE(d.atoms().size() == 3);
  CHECK(d.atoms()[1].value == 0.0);
  CHECK_FALSE(d.has_density());
  CHECK_THROWS(d.density(0.0));
  CHECK_THROWS_AS(NoiseSpec::parse("discrete:1@0.5,0@0.4"), ArgumentError);
  CHECK_THROWS_AS(NoiseSpec::parse("cauchy"), ArgumentError);
  CHECK(NoiseSpec::parse("laplace").kind() == NoiseSpec::Kind::laplacian);
}
