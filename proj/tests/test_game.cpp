#include <cmath>

#include "doctest.h"
#include "monoculture/game.hpp"
#include "oracles.hpp"

using namespace monoculture;

namespace {

UtilityTable table(double a, double h, double aa, double ah, double ha, double hh) {
  return UtilityTable::from_array({a, h, aa, ah, ha, hh});
}

}  // namespace

TEST_CASE("payoffs average over the two hiring orders") {
  const PayoffMatrix m = PayoffMatrix::from(table(1, 0.8, 0.3, 0.5, 0.6, 0.4));
  CHECK(m.a_vs_a == doctest::Approx(0.65));
  CHECK(m.a_vs_h == doctest::Approx(0.8));
  CHECK(m.h_vs_a == doctest::Approx(0.65));
  CHECK(m.h_vs_h == doctest::Approx(0.6));
  CHECK(m.payoff(Strategy::H, Strategy::A) == m.h_vs_a);
}

TEST_CASE("equilibrium classification on synthetic tables") {
  SUBCASE("H dominant") {
    const auto e = classify_equilibrium(table(0.5, 1, 0.2, 0.6, 0.2, 0.5));
    CHECK(e.label == EquilibriumLabel::HH);
    CHECK_FALSE(e.braess);
  }
  SUBCASE("A dominant with a Braess loss") {
    // margin1 = 1 + 0.2 - 0.9 - 0.25 > 0, margin2 = 1 + 0.35 - 0.9 - 0.4 > 0, W_AA 1.2 < W_HH 1.3.
    const auto e = classify_equilibrium(table(1, 0.9, 0.2, 0.25, 0.35, 0.4));
    CHECK(e.label == EquilibriumLabel::AA);
    CHECK(e.dominance.a_dominant());
    CHECK(e.welfare_aa == doctest::Approx(1.2));
    CHECK(e.welfare_hh == doctest::Approx(1.3));
    CHECK(e.braess);
  }
  SUBCASE("anti-coordination gives the asymmetric label and a mixed p") {
    // A is better against H, H is better against A.
    const UtilityTable t = table(1, 0.9, 0.1, 0.3, 0.4, 0.4);
    const auto e = classify_equilibrium(t);
    CHECK(e.label == EquilibriumLabel::AH_asymmetric);
    REQUIRE(e.p_mixed);
    const PayoffMatrix m = PayoffMatrix::from(t);
    const double a = m.a_vs_a, b = m.a_vs_h, c = m.h_vs_a, d = m.h_vs_h;
    CHECK(*e.p_mixed == doctest::Approx((d - b) / (a - b - c + d)));
    // Indifference at the mixed point.
    const double p = *e.p_mixed;
    CHECK(p * a + (1 - p) * b == doctest::Approx(p * c + (1 - p) * d));
  }
  SUBCASE("coordination picks the better symmetric profile") {
    // A is better against A, H is better against H.
    const auto e = classify_equilibrium(table(1, 0.9, 0.5, 0.3, 0.3, 0.5));
    CHECK(e.coordination);
    CHECK(e.label == EquilibriumLabel::AA);
    CHECK(e.p_mixed);
  }
  SUBCASE("exact ties are flagged") {
    const auto e = classify_equilibrium(table(1, 1, 0.5, 0.5, 0.5, 0.5));
    CHECK(e.boundary);
    CHECK(e.dominance.weak);
  }
}

TEST_CASE("theta star construction for Mallows") {
  const TableSource source(Family::mallows(), CandidatePool({1, 0.5, 0}), Engine::exact);
  for (double theta_h : {0.5, 1.0, 2.0}) {
    const ThetaStarResult r = find_theta_star(theta_h, source);
    CAPTURE(theta_h);
    CHECK(r.theta_star > theta_h);
    CHECK(std::abs(r.gap_at_star) < 1e-6);
    REQUIRE(r.theta_prime);
    CHECK(*r.theta_prime > r.theta_star);
    // Recompute the witness independently with the pairwise engine.
    const UtilityTable t = exact_utility_table_pairwise(*r.theta_prime, theta_h, Family::mallows(),
                                                        CandidatePool({1, 0.5, 0}), 1);
    const DominanceFlags d = check_dominance(t);
    CHECK(d.dom1);
    CHECK(d.dom2);
    CHECK(exact_welfare(t, Profile::AA) < exact_welfare(t, Profile::HH));
  }
  const TableSource pl(Family::plackett_luce(), CandidatePool({1, 0.5, 0}), Engine::exact);
  CHECK_THROWS_AS(find_theta_star(1.0, pl), BracketError);
}

TEST_CASE("plane sweeps are row-major and thread independent") {
  const std::vector<double> th = {0.5, 1.0}, ta = {0.3, 1.0, 2.5};
  const auto dist = CandidateDistribution::uniform_centered(1, 3);
  McOptions o;
  o.n_samples = 20'000;
  o.seed = 9;
  o.threads = 1;
  const auto one = sweep_plane(th, ta, Family::rum(NoiseSpec::gaussian()), dist, Engine::mc, o);
  o.threads = 3;
  const auto three = sweep_plane(th, ta, Family::rum(NoiseSpec::gaussian()), dist, Engine::mc, o);
  REQUIRE(one.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(one[i].theta_h == th[i / 3]);
    CHECK(one[i].theta_a == ta[i % 3]);
    REQUIRE(one[i].table);
    REQUIRE(three[i].table);
    CHECK(one[i].table->as_array() == three[i].table->as_array());
  }
  const auto exact = sweep_plane(th, ta, Family::mallows(), CandidatePool({1, 0.5, 0}), Engine::exact, o);
  // Humans more accurate than the algorithm: HH.
  CHECK(exact[0].outcome->label == EquilibriumLabel::HH);
}

TEST_CASE("strategy sequences") {
  const StrategySequence s = StrategySequence::parse("AAAHH");
  CHECK(s.binary_value() == 28);
  CHECK(s.to_string() == "AAAHH");
  CHECK(StrategySequence::parse("HHHHH").binary_value() == 0);
  CHECK_THROWS_AS(StrategySequence::parse("AXH"), ArgumentError);
}

TEST_CASE("random-order k-firm utilities against enumeration") {
  const CandidatePool pool({1, 0.7, 0.3, 0});
  const std::vector<double> x(pool.values().begin(), pool.values().end());
  const KFirmGame game(3, 2.0, 1.75, pool);
  for (int m = 0; m <= 3; ++m) {
    std::vector<bool> is_a(3, false);
    for (int f = 0; f < m; ++f) is_a[static_cast<std::size_t>(f)] = true;
    const auto [ua, uh] = oracle::random_order(is_a, 2.0, 1.75, x);
    CAPTURE(m);
    if (m > 0) CHECK(game.utility_a(m) == doctest::Approx(ua).epsilon(1e-12));
    if (m < 3) CHECK(game.utility_h(m) == doctest::Approx(uh).epsilon(1e-12));
  }
  CHECK_THROWS(game.utility_a(0));
  CHECK_THROWS(game.utility_h(3));
}

TEST_CASE("k = 2 dominance matches the two-firm flags") {
  const CandidatePool pool({1, 0.5, 0});
  for (double phi_h : {1.3, 2.0}) {
    for (double phi_a : {1.5, 2.2, 3.0, 6.0}) {
      const KFirmGame game(2, phi_a, phi_h, pool);
      const DominanceFlags d = check_dominance(exact_utility_table(phi_a - 1, phi_h - 1, Family::mallows(), pool));
      CAPTURE(phi_a);
      CAPTURE(phi_h);
      CHECK(game.a_dominant() == d.a_dominant());
    }
  }
}

TEST_CASE("k-firm Braess instance") {
  const KFirmBraessReport r = kfirm_braess_check(3, 2.0, 1.75, CandidateDistribution::uniform(0, 1, 4));
  CHECK(r.a_dominant);
  CHECK(r.equilibria == std::vector<int>{3});
  CHECK(r.utility_all_a == doctest::Approx(0.551).epsilon(0.002 / 0.551));
  CHECK(r.utility_all_h == doctest::Approx(0.552).epsilon(0.002 / 0.552));
  CHECK(r.braess);
}

TEST_CASE("sequential sweeps and binary counter scans") {
  const auto dist = CandidateDistribution::uniform(0, 1, 5);
  const auto cells = sweep_sequences({1.5, 3.0}, {1.2, 2.0, 6.0}, 3, dist, 1);
  REQUIRE(cells.size() == 6);
  CHECK(cells[0].theta_h == doctest::Approx(0.5));
  CHECK(cells[0].sequence == "HHH");
  CHECK(cells[2].sequence.front() == 'A');
  for (const auto& c : cells) CHECK(c.binary_value == StrategySequence::parse(c.sequence).binary_value());

  std::vector<double> grid;
  for (double p = 2.0; p <= 4.0; p += 0.05) grid.push_back(p);
  const ScanReport scan = binary_counter_scan(2.0, grid, 4, dist);
  CHECK(scan.labels.size() == grid.size());
  CHECK(scan.monotone);
  CHECK_FALSE(scan.first_violation);
  CHECK(scan.labels.front().binary_value() == 0);
}
