#include "monoculture/game.hpp"

#include <cmath>

#include "monoculture/parallel.hpp"

namespace monoculture {

PayoffMatrix PayoffMatrix::from(const UtilityTable& t) {
  return {0.5 * t.first_a + 0.5 * t.aa, 0.5 * t.first_a + 0.5 * t.ha, 0.5 * t.first_h + 0.5 * t.ah,
          0.5 * t.first_h + 0.5 * t.hh};
}

double PayoffMatrix::payoff(Strategy own, Strategy rival) const {
  if (own == Strategy::A) return rival == Strategy::A ? a_vs_a : a_vs_h;
  return rival == Strategy::A ? h_vs_a : h_vs_h;
}

std::string to_string(EquilibriumLabel label) {
  switch (label) {
    case EquilibriumLabel::HH:
      return "HH";
    case EquilibriumLabel::AA:
      return "AA";
    case EquilibriumLabel::AH_asymmetric:
      return "AH";
  }
  return "";
}

namespace {

// -1, 0 or +1 for a comparison decided by the caller's tolerance.
struct Signs {
  int dom1;
  int dom2;
  int welfare;  // sign of W_HH - W_AA
};

EquilibriumOutcome classify_from(const UtilityTable& t, const Signs& s) {
  EquilibriumOutcome out{};
  const PayoffMatrix p = PayoffMatrix::from(t);
  out.dominance.margin1 = t.first_a + t.aa - t.first_h - t.ah;
  out.dominance.margin2 = t.first_a + t.ha - t.first_h - t.hh;
  out.dominance.dom1 = s.dom1 > 0;
  out.dominance.dom2 = s.dom2 > 0;
  out.dominance.weak = s.dom1 == 0 || s.dom2 == 0;
  out.welfare_aa = exact_welfare(t, Profile::AA);
  out.welfare_hh = exact_welfare(t, Profile::HH);
  out.welfare_ah = exact_welfare(t, Profile::AH);
  out.boundary = out.dominance.weak;
  const double denom = p.a_vs_a - p.a_vs_h - p.h_vs_a + p.h_vs_h;
  if (denom != 0.0) {
    const double q = (p.h_vs_h - p.a_vs_h) / denom;
    if (q > 0.0 && q < 1.0) out.p_mixed = q;
  }
  if (s.dom1 > 0 && s.dom2 > 0) {
    out.label = EquilibriumLabel::AA;
  } else if (s.dom2 > 0) {
    out.label = EquilibriumLabel::AH_asymmetric;  // anti-coordination: A against H, H against A
  } else if (s.dom1 > 0 && s.dom2 < 0) {
    out.coordination = true;
    out.label = s.welfare > 0 ? EquilibriumLabel::HH : EquilibriumLabel::AA;
  } else {
    out.label = EquilibriumLabel::HH;
  }
  if (out.label != EquilibriumLabel::AH_asymmetric && !out.coordination) out.p_mixed.reset();
  out.braess = out.dominance.a_dominant() && s.welfare > 0;
  return out;
}

int sign_with(double x, double tol) { return x > tol ? 1 : (x < -tol ? -1 : 0); }

int sign_z(const EstimateWithError& e, double z) {
  const Verdict v = verdict_for(e, z);
  return v == Verdict::holds ? 1 : (v == Verdict::fails ? -1 : 0);
}

const std::array<double, 6> kDom1 = {1, -1, 1, -1, 0, 0};
const std::array<double, 6> kDom2 = {1, -1, 0, 0, 1, -1};
const std::array<double, 6> kWelfareGap = {-1, 1, -1, 0, 0, 1};

EquilibriumOutcome classify_mc(const McUtilityResult& r, double z) {
  return classify_from(r.table, {sign_z(r.contrast(kDom1), z), sign_z(r.contrast(kDom2), z),
                                 sign_z(r.contrast(kWelfareGap), z)});
}

}  // namespace

DominanceFlags check_dominance(const UtilityTable& t, double tol) {
  DominanceFlags d{};
  d.margin1 = t.first_a + t.aa - (t.first_h + t.ah);
  d.margin2 = t.first_a + t.ha - (t.first_h + t.hh);
  d.dom1 = d.margin1 > tol;
  d.dom2 = d.margin2 > tol;
  d.weak = std::abs(d.margin1) <= tol || std::abs(d.margin2) <= tol;
  return d;
}

EquilibriumOutcome classify_equilibrium(const UtilityTable& t, double tol) {
  for (double v : t.as_array()) {
    if (!std::isfinite(v)) throw NumericalError("utility table has non-finite entries");
  }
  const double welfare_gap = exact_welfare(t, Profile::HH) - exact_welfare(t, Profile::AA);
  return classify_from(t, {sign_with(t.first_a + t.aa - t.first_h - t.ah, tol),
                           sign_with(t.first_a + t.ha - t.first_h - t.hh, tol), sign_with(welfare_gap, tol)});
}

TableSource::TableSource(Family family, CandidateDistribution values, Engine engine, McOptions options)
    : family_(std::move(family)), values_(std::move(values)), engine_(engine), options_(options) {
  if (engine_ == Engine::exact && !exact_supported(family_, values_)) {
    throw UnsupportedError("exact engine is not available for " + family_.name() + " on " + values_.describe());
  }
}

UtilityTable TableSource::operator()(double theta_a, double theta_h) const {
  if (engine_ == Engine::exact) return exact_utility_table(theta_a, theta_h, family_, values_);
  return mc(theta_a, theta_h).table;
}

McUtilityResult TableSource::mc(double theta_a, double theta_h) const {
  return mc_utility_table(theta_a, theta_h, family_, values_, options_);
}

ThetaStarResult find_theta_star(double theta_h, const TableSource& tables, double tol) {
  if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
  const bool exact = tables.engine() == Engine::exact;
  const double z = tables.options().z_threshold;
  struct Gap {
    double value;
    double threshold;  // |value| below this counts as zero
  };
  auto gap = [&](double theta_a) -> Gap {
    if (exact) {
      const UtilityTable t = tables(theta_a, theta_h);
      return {t.first_a + t.aa - t.first_h - t.ah, 0.0};
    }
    const EstimateWithError e = tables.mc(theta_a, theta_h).contrast(kDom1);
    return {e.mean, 2.0 * e.std_error};
  };

  const Gap at_h = gap(theta_h);
  if (!(at_h.value < -std::max(at_h.threshold, exact ? 1e-12 : 0.0))) {
    throw BracketError("f - g is not negative at theta_A = theta_H; no indifference point to bracket");
  }
  double lo = theta_h;
  double hi = 64.0 * theta_h;
  while (gap(hi).value <= 0.0) {
    hi *= 2.0;
    if (hi > 1024.0 * theta_h) throw BracketError("f - g stays nonpositive up to theta_A = 1024 theta_H");
  }
  double mid = 0.5 * (lo + hi);
  Gap gm = gap(mid);
  for (int it = 0; it < 200; ++it) {
    if (exact ? (hi - lo <= 1e-13 * hi) : std::abs(gm.value) < gm.threshold) break;
    (gm.value < 0.0 ? lo : hi) = mid;
    mid = 0.5 * (lo + hi);
    gm = gap(mid);
  }
  if (std::abs(gm.value) >= std::max(tol, gm.threshold)) {
    throw NumericalError("bisection did not reach |f - g| < tol");
  }

  ThetaStarResult r{};
  r.theta_h = theta_h;
  r.theta_star = mid;
  r.gap_at_star = gm.value;
  const UtilityTable at_star = tables(mid, theta_h);
  r.welfare_aa_at_star = exact_welfare(at_star, Profile::AA);
  r.g_at_star = at_star.first_h + at_star.ah;

  for (int m = 20; m >= 0; --m) {
    const double candidate = mid * (1.0 + std::ldexp(1.0, -m));
    bool ok = false;
    UtilityTable t;
    if (exact) {
      t = tables(candidate, theta_h);
      const EquilibriumOutcome o = classify_equilibrium(t);
      ok = o.braess;
    } else {
      const McUtilityResult res = tables.mc(candidate, theta_h);
      t = res.table;
      ok = classify_mc(res, z).braess;
    }
    if (ok) {
      r.theta_prime = candidate;
      r.table_at_prime = t;
      break;
    }
  }
  r.message = r.theta_prime ? "ok" : "Braess window empty within resolution";
  return r;
}

std::vector<SweepCell> sweep_plane(const std::vector<double>& theta_h, const std::vector<double>& theta_a,
                                   const Family& family, const CandidateDistribution& values, Engine engine,
                                   const McOptions& options) {
  std::vector<SweepCell> cells;
  for (double th : theta_h)
    for (double ta : theta_a) cells.push_back({th, ta, {}, {}, {}, 0, {}});
  parallel_for(cells.size(), options.threads, [&](std::size_t idx) {
    SweepCell& cell = cells[idx];
    try {
      if (engine == Engine::exact) {
        const UtilityTable t = exact_utility_table(cell.theta_a, cell.theta_h, family, values);
        cell.table = t;
        cell.outcome = classify_equilibrium(t);
      } else {
        McOptions local = options;
        local.threads = 1;
        const std::size_t row = idx / theta_a.size();
        const std::size_t col = idx % theta_a.size();
        local.seed = make_stream(options.seed, row, col)();
        const McUtilityResult r = mc_utility_table(cell.theta_a, cell.theta_h, family, values, local);
        cell.table = r.table;
        cell.outcome = classify_mc(r, options.z_threshold);
      }
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });
  return cells;
}

}  // namespace monoculture
