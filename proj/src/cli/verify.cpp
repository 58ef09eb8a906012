#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "monoculture/cli.hpp"
#include "monoculture/parallel.hpp"

namespace monoculture::cli {

namespace {

std::string g6(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Unnormalized Mallows weights phi^-inv straight from the inversion counts;
// the oracle for every closed form below.
std::vector<double> mallows_weights(double phi, int n, double& total) {
  const PermutationTable& table = PermutationTable::of_size(n);
  std::vector<double> w(table.count());
  CompensatedSum sum;
  for (std::size_t k = 0; k < table.count(); ++k) {
    w[k] = std::pow(phi, -table.inversions(k));
    sum += w[k];
  }
  total = sum.value();
  return w;
}

void mallows_lemmas(Report& r) {
  double worst_norm = 0, worst_p1 = 0, worst_abba = 0, worst_contig = 0, worst_subset = 0, max_noncontig_tv = 0;
  for (double phi : {1.1, 2.0, 5.0}) {
    for (int n = 2; n <= 6; ++n) {
      const MallowsModel model(phi, n);
      const PermutationTable& table = PermutationTable::of_size(n);
      double z = 0;
      const std::vector<double> w = mallows_weights(phi, n, z);
      worst_norm = std::max(worst_norm, std::abs(model.normalizer() - z) / z);

      std::vector<std::vector<double>> top2(n + 1, std::vector<double>(n + 1, 0.0));
      for (std::size_t k = 0; k < table.count(); ++k) top2[table.row(k)[0]][table.row(k)[1]] += w[k] / z;
      for (int i = 1; i <= n; ++i) {
        double p = 0;
        for (int j = 1; j <= n; ++j) p += top2[i][j];
        worst_p1 = std::max(worst_p1, std::abs(model.first_choice(i) - p));
        worst_p1 = std::max(worst_p1, std::abs(MallowsModel::block_first_choice(phi, n, i) - p));
        for (int j = i + 1; j <= n; ++j) {
          worst_abba = std::max(worst_abba, std::abs(top2[i][j] / top2[j][i] - phi) / phi);
        }
      }

      // Removed sets of size 1 and 2: restriction of the ranking vs Mallows
      // on the survivors, and the library's first-choice probabilities.
      for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        const CandidateSet removed = CandidateSet::from_mask(mask);
        if (removed.size() > 2 || n - removed.size() < 2) continue;
        std::vector<int> survivors;
        for (int c = 1; c <= n; ++c)
          if (!removed.contains(c)) survivors.push_back(c);
        const int m = static_cast<int>(survivors.size());
        const bool contiguous = survivors.back() - survivors.front() + 1 == m;
        std::map<std::vector<int>, double> restricted;
        std::vector<double> first(n + 1, 0.0);
        for (std::size_t k = 0; k < table.count(); ++k) {
          // Survivors relabelled 1..m in index order.
          std::vector<int> rank;
          for (int c : table.row(k)) {
            if (removed.contains(c)) continue;
            const auto pos = std::lower_bound(survivors.begin(), survivors.end(), c) - survivors.begin();
            rank.push_back(static_cast<int>(pos) + 1);
          }
          restricted[rank] += w[k] / z;
          first[survivors[static_cast<std::size_t>(rank[0] - 1)]] += w[k] / z;
        }
        const MallowsModel sub(phi, m);
        double tv = 0;
        for (const auto& [rank, p] : restricted) tv += std::abs(p - sub.pmf(Permutation(rank)));
        tv *= 0.5;
        if (contiguous) {
          worst_contig = std::max(worst_contig, tv);
        } else {
          max_noncontig_tv = std::max(max_noncontig_tv, tv);
        }
        for (int c : survivors) {
          worst_subset = std::max(worst_subset, std::abs(model.first_choice(c, removed) - first[c]));
        }
      }
    }
  }
  r.add("normalizer product form", worst_norm < 1e-10,
        "max relative error " + g6(worst_norm) + " (n <= 6, phi in {1.1, 2, 5}); tolerance 1e-10");
  r.add("first-choice closed form", worst_p1 < 1e-12,
        "max abs error vs enumeration " + g6(worst_p1) + "; tolerance 1e-12");
  r.add("top-two ratio equals phi", worst_abba < 1e-10, "max relative error " + g6(worst_abba) + "; tolerance 1e-10");
  r.add("projection on contiguous survivors", worst_contig < 1e-10,
        "max total variation " + g6(worst_contig) + " for |S| <= 2 with survivors a block; tolerance 1e-10");
  r.add("first choice after removal", worst_subset < 1e-12,
        "max abs error vs enumeration " + g6(worst_subset) + " for every |S| <= 2 (non-contiguous survivors are not "
        "Mallows with the same phi, total variation up to " + g6(max_noncontig_tv) + ", so they are enumerated)");
}

void identities(Report& r, int threads) {
  const double d = 0.1;
  const Family b1 = Family::rum(NoiseSpec::discrete({{1, d / 2}, {0, 1 - d}, {-1, d / 2}}));
  struct Case {
    Family family;
    CandidatePool pool;
    double theta_a, theta_h;
  };
  const std::vector<Case> cases = {
      {Family::mallows(), CandidatePool({1, 0.7, 0.2, 0}), 2.0, 1.0},
      {Family::mallows(), CandidatePool({4, 3, 2, 1, 0}), 0.5, 1.5},
      {Family::plackett_luce(), CandidatePool({1, 0.7, 0.2, 0}), 1.5, 0.8},
      {Family::rum(NoiseSpec::gumbel()), CandidatePool({1, 0.7, 0.2, 0}), 1.0, 2.0},
      {b1, CandidatePool({1.75, 0.5, 0}), 1.0, 1.0},
      {Family::rum(NoiseSpec::gaussian()), CandidatePool({1, 0.5, 0}), 1.3, 0.9},
  };
  double worst_route = 0, worst_id = 0, worst_sym = 0;
  for (const Case& c : cases) {
    const UtilityTable f = exact_utility_table(c.theta_a, c.theta_h, c.family, c.pool);
    const UtilityTable p = exact_utility_table_pairwise(c.theta_a, c.theta_h, c.family, c.pool, threads);
    for (std::size_t k = 0; k < 6; ++k) {
      worst_route = std::max(worst_route, std::abs(f.as_array()[k] - p.as_array()[k]));
    }
    worst_id = std::max(worst_id, identity_check_uah_uaa(c.theta_h, c.theta_h, c.family, c.pool, threads));
    const UtilityTable s = exact_utility_table(c.theta_h, c.theta_h, c.family, c.pool);
    worst_sym = std::max({worst_sym, std::abs(s.first_a - s.first_h), std::abs(s.ha - s.hh), std::abs(s.ah - s.hh)});
  }
  r.add("factored table = pair enumeration", worst_route < 1e-12,
        "max abs difference " + g6(worst_route) +
            " over Mallows, PL, Gumbel, discrete and Gaussian cases; tolerance 1e-12");
  r.add("U_AH - U_AA identity", worst_id < 1e-12,
        "max residual of U_AH - U_AA = E[(pi_1 - pi_2) 1{pi_1 != sigma_1}] " + g6(worst_id) + "; tolerance 1e-12");
  r.add("equal accuracy symmetry", worst_sym < 1e-12,
        "max |U_A - U_H|, |U_HA - U_HH|, |U_AH - U_HH| at theta_A = theta_H: " + g6(worst_sym) + "; tolerance 1e-12");

  double worst_pl = 0;
  for (int n = 2; n <= 5; ++n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(1.0 - 0.3 * i - 0.05 * i * i);
    for (double theta : {0.5, 1.0, 2.0}) {
      const UtilityTable t = exact_utility_table(theta, theta, Family::plackett_luce(), CandidatePool(v));
      worst_pl = std::max(worst_pl, std::abs(t.ah - t.aa));
    }
  }
  r.add("plackett-luce null effect", worst_pl < 1e-12,
        "max |U_AH - U_AA| " + g6(worst_pl) + " (n <= 5, theta in {0.5, 1, 2}); tolerance 1e-12");

  double worst_seq = 0;
  const CandidatePool pool({1, 0.6, 0.3, 0});
  for (auto [phi_a, phi_h] : {std::pair{2.0, 1.5}, std::pair{1.5, 3.0}}) {
    const UtilityTable t = exact_utility_table(phi_a - 1, phi_h - 1, Family::mallows(), pool);
    const SequentialMallowsGame game(phi_a, phi_h, pool);
    for (Strategy a : {Strategy::A, Strategy::H}) {
      for (Strategy b : {Strategy::A, Strategy::H}) {
        const std::vector<Strategy> seq = {a, b};
        const std::vector<double> u = game.utilities(seq);
        worst_seq = std::max({worst_seq, std::abs(u[0] - t.first(a)), std::abs(u[1] - t.second(a, b))});
      }
    }
  }
  r.add("sequential k=2 = utility table", worst_seq < 1e-12,
        "max abs difference " + g6(worst_seq) + "; tolerance 1e-12");
}

void dominance(Report& r) {
  int cases = 0, dom2 = 0, weaker = 0, first = 0;
  double min_dom2 = INFINITY, min_weaker = INFINITY, min_first = INFINITY;
  for (int n = 3; n <= 6; ++n) {
    const auto values = CandidateDistribution::uniform(0, 1, n);
    for (double th : {0.5, 1.0, 2.0}) {
      const UtilityTable eq = exact_utility_table(th, th, Family::mallows(), values);
      const double m_first = -check_dominance(eq).margin1;
      min_first = std::min(min_first, m_first);
      first += m_first > 1e-12;
      for (double ratio : {1.5, 2.0, 4.0}) {
        const UtilityTable t = exact_utility_table(th * ratio, th, Family::mallows(), values);
        ++cases;
        const DominanceFlags d = check_dominance(t);
        min_dom2 = std::min(min_dom2, d.margin2);
        dom2 += d.dom2;
        min_weaker = std::min(min_weaker, t.hh - t.ah);
        weaker += t.hh - t.ah > 1e-12;
      }
    }
  }
  r.add("A best reply to H when theta_A > theta_H", dom2 == cases,
        std::to_string(dom2) + "/" + std::to_string(cases) + " Mallows cases (n 3..6), min margin " + g6(min_dom2));
  r.add("U_HH > U_AH when theta_A > theta_H", weaker == cases,
        std::to_string(weaker) + "/" + std::to_string(cases) + " cases, min U_HH - U_AH " + g6(min_weaker));
  r.add("H best reply to A at equal accuracy", first == 12,
        std::to_string(first) + "/12 cases, min U_H + U_AH - U_A - U_AA " + g6(min_first));
}

void monotonicity(Report& r, int threads) {
  const std::vector<double> grid = {0.25, 0.5, 1.0, 2.0, 4.0};
  const auto values = CandidateDistribution::uniform(0, 1, 5);
  McOptions o;
  o.threads = threads;
  for (CandidateSet removed : {CandidateSet{}, CandidateSet{2}, CandidateSet{1, 3}}) {
    const ConditionReport c = check_monotonicity(Family::mallows(), grid, removed, values, o, Engine::exact);
    r.add("mallows exact, |S|=" + std::to_string(removed.size()), c.verdict == Verdict::holds,
          "least step " + g6(c.estimate.mean) + ", verdict " + to_string(c.verdict));
  }
  o.n_samples = 200'000;
  for (const char* noise : {"gaussian", "laplacian"}) {
    for (CandidateSet removed : {CandidateSet{}, CandidateSet{1}}) {
      o.seed = 11 + removed.size();
      const ConditionReport c = check_monotonicity(Family::rum(NoiseSpec::parse(noise)), grid, removed,
                                                   CandidateDistribution::uniform(0, 1, 4), o, Engine::mc);
      r.add(std::string(noise) + " mc, |S|=" + std::to_string(removed.size()), c.verdict == Verdict::holds,
            "least step " + g6(c.estimate.mean) + " (z " + g6(c.estimate.z_score()) + "), verdict " +
                to_string(c.verdict) + ", N=200000");
    }
  }
}

void conditions(Report& r) {
  McOptions o;
  const CandidatePool pool4({1, 0.7, 0.2, 0});
  const CandidatePool pool3({1, 0.5, 0});
  auto expect = [&](const std::string& name, const ConditionReport& c, Verdict want) {
    r.add(name, c.verdict == want,
          "expected " + to_string(want) + ", got " + to_string(c.verdict) + " (estimate " + g6(c.estimate.mean) + ")");
  };
  const Family mallows = Family::mallows();
  auto first = [&](const Family& f, const CandidatePool& pool) {
    return check_pref_first_position(RankingModelSpec(f, 1.0), pool, o, Engine::exact);
  };
  auto weaker = [&](const Family& f, double t1, double t2, const CandidatePool& pool) {
    return check_pref_weaker_competition(f, t1, t2, pool, o, Engine::exact);
  };
  expect("mallows first position", first(mallows, pool4), Verdict::holds);
  expect("mallows weaker competition", weaker(mallows, 2.0, 1.0, pool4), Verdict::holds);
  for (const char* noise : {"gaussian", "laplacian"}) {
    const Family f = Family::rum(NoiseSpec::parse(noise));
    expect(std::string(noise) + " n=3 first position", first(f, pool3), Verdict::holds);
    expect(std::string(noise) + " n=3 weaker competition", weaker(f, 1.5, 1.0, pool3), Verdict::holds);
  }
  expect("plackett-luce first position is a null effect", first(Family::plackett_luce(), pool4),
         Verdict::inconclusive);
  const double d1 = 0.1;
  const Family b1 = Family::rum(NoiseSpec::discrete({{1, d1 / 2}, {0, 1 - d1}, {-1, d1 / 2}}));
  expect("discrete counterexample violates first position", first(b1, CandidatePool({1.75, 0.5, 0})),
         Verdict::fails);
  const double d2 = 0.05;
  const Family b2 =
      Family::rum(NoiseSpec::discrete({{1, (1 - d2) / 2}, {-1, (1 - d2) / 2}, {10, d2 / 2}, {-10, d2 / 2}}));
  expect("discrete counterexample violates weaker competition", weaker(b2, 1.1, 0.9, CandidatePool({3, 2, 0})),
         Verdict::fails);
}

void appendix_c(Report& r) {
  const NoiseSpec gauss = NoiseSpec::gaussian();
  const NoiseSpec lap = NoiseSpec::laplacian();

  bool case1 = true;
  for (double a : {-3.0, -1.0, 0.0, 0.25}) {
    for (double theta : {0.5, 1.0, 4.0}) {
      case1 = case1 && conditional_order_probability(lap, 1.0, 0.25, theta, a) == 0.5;
    }
  }
  r.add("laplace below both values is 1/2", case1, "a <= x_j returns exactly 0.5 on every tested point");

  double worst_closed = 0;
  for (double theta : {0.5, 1.0, 3.0}) {
    for (double a = -1.0; a <= 3.0; a += 0.125) {
      const double closed = conditional_order_probability(lap, 1.0, 0.25, theta, a);
      const double quad = conditional_order_probability_quadrature(lap, 1.0, 0.25, theta, a);
      worst_closed = std::max(worst_closed, std::abs(closed - quad));
    }
  }
  r.add("laplace closed form = quadrature", worst_closed < 1e-9,
        "max abs difference " + g6(worst_closed) + "; tolerance 1e-9");

  for (const NoiseSpec* noise : {&gauss, &lap}) {
    double worst_step = INFINITY;
    for (double theta : {0.5, 1.0, 2.0}) {
      double prev = conditional_order_probability(*noise, 1.0, 0.25, theta, -2.0);
      for (double a = -2.0 + 0.02; a <= 4.0; a += 0.02) {
        const double cur = conditional_order_probability(*noise, 1.0, 0.25, theta, a);
        worst_step = std::min(worst_step, cur - prev);
        prev = cur;
      }
    }
    r.add(noise->name() + " truncated order probability nondecreasing in a", worst_step >= -1e-9,
          "smallest finite difference " + g6(worst_step) + " on a in [-2, 4] step 0.02; tolerance -1e-9");
  }

  Rng rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  int g_strict = 0, l_interleaved = 0, l_strict = 0, l_separated = 0, l_tie = 0;
  constexpr int kTrials = 10'000;
  for (int t = 0; t < kTrials; ++t) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (a < b) std::swap(a, b);
    if (c < d) std::swap(c, d);
    g_strict += well_ordered_check(gauss, a, b, c, d);
    const bool separated = b >= c || d >= a;
    if (separated) {
      ++l_separated;
      l_tie += !well_ordered_check(lap, a, b, c, d) && std::abs(well_ordered_margin(lap, a, b, c, d)) < 1e-9;
    } else {
      ++l_interleaved;
      l_strict += well_ordered_check(lap, a, b, c, d);
    }
  }
  r.add("gaussian well-ordered", g_strict == kTrials, std::to_string(g_strict) + "/10000 random quadruples strict");
  r.add("laplacian well-ordered where intervals interleave", l_strict == l_interleaved,
        std::to_string(l_strict) + "/" + std::to_string(l_interleaved) + " strict");
  r.add("laplacian exact tie where intervals separate", l_tie == l_separated,
        std::to_string(l_tie) + "/" + std::to_string(l_separated) +
            " equal densities (|a-c| + |b-d| = |a-d| + |b-c| when [d,c] and [b,a] do not overlap)");
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> suites = {"mallows-lemmas", "identities", "dominance", "monotonicity",
                                                  "conditions",     "appendix-c", "all"};
  return suites;
}

Report verify(const std::string& suite, int threads) {
  Report r{"verify " + suite, {}};
  const bool all = suite == "all";
  if (all || suite == "mallows-lemmas") mallows_lemmas(r);
  if (all || suite == "identities") identities(r, threads);
  if (all || suite == "dominance") dominance(r);
  if (all || suite == "monotonicity") monotonicity(r, threads);
  if (all || suite == "conditions") conditions(r);
  if (all || suite == "appendix-c") appendix_c(r);
  if (r.checks.empty()) throw ConfigError("unknown suite '" + suite + "'");
  return r;
}

}  // namespace monoculture::cli
