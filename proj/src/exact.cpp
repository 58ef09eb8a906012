#include "monoculture/exact.hpp"

#include <cmath>
#include <memory>

#include "monoculture/parallel.hpp"

namespace monoculture {

char to_char(Strategy s) { return s == Strategy::A ? 'A' : 'H'; }

double UtilityTable::second(Strategy first, Strategy second) const {
  if (first == Strategy::A) return second == Strategy::A ? aa : ah;
  return second == Strategy::A ? ha : hh;
}

UtilityTable UtilityTable::from_array(const std::array<double, 6>& v) {
  UtilityTable t;
  t.first_a = v[0];
  t.first_h = v[1];
  t.aa = v[2];
  t.ah = v[3];
  t.ha = v[4];
  t.hh = v[5];
  return t;
}

double SelectionPmf::expected_value(const CandidatePool& pool) const {
  if (static_cast<int>(probabilities.size()) != pool.size()) throw ArgumentError("pmf size does not match pool");
  double s = 0.0;
  for (int c = 1; c <= pool.size(); ++c) s += prob(c) * pool.value(c);
  return s;
}

SelectionPmf exact_selection_pmf(const RankingModelSpec& spec, const CandidatePool& pool, CandidateSet removed) {
  const int n = pool.size();
  if ((removed.mask() & ~CandidateSet::all(n).mask()) != 0)
    throw ArgumentError("removed set refers to candidates beyond n");
  if (removed.size() >= n) throw ArgumentError("cannot remove every candidate");
  if (spec.family().is_mallows()) return {MallowsModel(spec.phi(), n).first_choice_pmf(removed)};
  const std::vector<double> pmf = permutation_pmf(spec, pool);
  const PermutationTable& perms = PermutationTable::of_size(n);
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < perms.count(); ++k) {
    out[static_cast<std::size_t>(first_surviving(perms.row(k), removed.mask()) - 1)] += pmf[k];
  }
  return {out};
}

CandidatePool exact_pool(const Family& family, const CandidateDistribution& values) {
  if (values.is_fixed()) return values.pool();
  if (family.value_independent()) return values.mean_pool();
  throw UnsupportedError(
      "exact computation over a random candidate distribution needs a value-independent "
      "family; use the Monte Carlo engine for " +
      family.name());
}

namespace {

struct ExactModel {
  std::vector<double> pmf;
  std::shared_ptr<const SurvivorTable> survivors;
};

ExactModel exact_model(const Family& family, double theta, const CandidatePool& pool) {
  const RankingModelSpec spec(family, theta);
  ExactModel m;
  if (family.is_mallows()) {
    // The model object owns the table; keep it alive alongside.
    auto model = std::make_shared<MallowsModel>(spec.phi(), pool.size());
    m.pmf = model->permutation_pmf();
    m.survivors = std::shared_ptr<const SurvivorTable>(model, &model->survivor_table());
  } else {
    m.pmf = permutation_pmf(spec, pool);
    m.survivors = std::make_shared<SurvivorTable>(m.pmf, pool.size());
  }
  return m;
}

double first_pick_value(const SurvivorTable& t, const CandidatePool& pool) {
  double s = 0.0;
  for (int c = 1; c <= pool.size(); ++c) s += t.prob(0, c) * pool.value(c);
  return s;
}

double second_pick_value(const ExactModel& m, const CandidatePool& pool) {
  const PermutationTable& perms = PermutationTable::of_size(pool.size());
  CompensatedSum s;
  for (std::size_t k = 0; k < perms.count(); ++k) s += m.pmf[k] * pool.value(perms.row(k)[1]);
  return s.value();
}

// E[value of the second mover's top survivor after the first mover's top pick].
double after_value(const SurvivorTable& first, const SurvivorTable& second, const CandidatePool& pool) {
  double s = 0.0;
  for (int c = 1; c <= pool.size(); ++c) {
    const auto taken = std::uint32_t{1} << (c - 1);
    double v = 0.0;
    for (int d = 1; d <= pool.size(); ++d) {
      if (d != c) v += second.prob(taken, d) * pool.value(d);
    }
    s += first.prob(0, c) * v;
  }
  return s;
}

// Sum over independent (first, second) ranking pairs of p1 p2 g(row1, row2).
template <class G>
double pair_sum(const std::vector<double>& p1, const std::vector<double>& p2, int n, int threads, G g) {
  const PermutationTable& perms = PermutationTable::of_size(n);
  std::vector<double> partial(perms.count(), 0.0);
  parallel_for(perms.count(), threads, [&](std::size_t k1) {
    if (p1[k1] == 0.0) return;
    auto r1 = perms.row(k1);
    CompensatedSum s;
    for (std::size_t k2 = 0; k2 < perms.count(); ++k2) {
      if (p2[k2] != 0.0) s += p2[k2] * g(r1, perms.row(k2));
    }
    partial[k1] = p1[k1] * s.value();
  });
  CompensatedSum total;
  for (double v : partial) total += v;
  return total.value();
}

}  // namespace

UtilityTable exact_utility_table(double theta_a, double theta_h, const Family& family,
                                 const CandidateDistribution& values) {
  const CandidatePool pool = exact_pool(family, values);
  const ExactModel a = exact_model(family, theta_a, pool);
  const ExactModel h = exact_model(family, theta_h, pool);
  UtilityTable t;
  t.first_a = first_pick_value(*a.survivors, pool);
  t.first_h = first_pick_value(*h.survivors, pool);
  t.aa = second_pick_value(a, pool);
  t.ah = after_value(*a.survivors, *h.survivors, pool);
  t.ha = after_value(*h.survivors, *a.survivors, pool);
  t.hh = after_value(*h.survivors, *h.survivors, pool);
  return t;
}

UtilityTable exact_utility_table_pairwise(double theta_a, double theta_h, const Family& family,
                                          const CandidateDistribution& values, int threads) {
  const CandidatePool pool = exact_pool(family, values);
  const int n = pool.size();
  const std::vector<double> pa = permutation_pmf(RankingModelSpec(family, theta_a), pool);
  const std::vector<double> ph = permutation_pmf(RankingModelSpec(family, theta_h), pool);
  const PermutationTable& perms = PermutationTable::of_size(n);
  auto single = [&](const std::vector<double>& p, int position) {
    CompensatedSum s;
    for (std::size_t k = 0; k < perms.count(); ++k)
      s += p[k] * pool.value(perms.row(k)[static_cast<std::size_t>(position)]);
    return s.value();
  };
  auto second_mover = [&](auto r1, auto r2) {
    return pool.value(first_surviving(r2, std::uint32_t{1} << (r1[0] - 1)));
  };
  UtilityTable t;
  t.first_a = single(pa, 0);
  t.first_h = single(ph, 0);
  t.aa = single(pa, 1);
  t.ah = pair_sum(pa, ph, n, threads, second_mover);
  t.ha = pair_sum(ph, pa, n, threads, second_mover);
  t.hh = pair_sum(ph, ph, n, threads, second_mover);
  return t;
}

double identity_check_uah_uaa(double theta_a, double theta_h, const Family& family, const CandidateDistribution& values,
                              int threads) {
  if (theta_a != theta_h) throw ArgumentError("the U_AH - U_AA identity needs theta_a == theta_h");
  const CandidatePool pool = exact_pool(family, values);
  const UtilityTable t = exact_utility_table(theta_a, theta_h, family, pool);
  const std::vector<double> p = permutation_pmf(RankingModelSpec(family, theta_a), pool);
  // sigma is the shared ranking, pi the independent one.
  const double rhs = pair_sum(p, p, pool.size(), threads, [&](auto sigma, auto pi) {
    return pi[0] != sigma[0] ? pool.value(pi[0]) - pool.value(pi[1]) : 0.0;
  });
  return std::abs((t.ah - t.aa) - rhs);
}

double exact_welfare(const UtilityTable& t, Profile profile) {
  switch (profile) {
    case Profile::AA:
      return t.first_a + t.aa;
    case Profile::HH:
      return t.first_h + t.hh;
    case Profile::AH:
      return 0.5 * (t.first_a + t.ah) + 0.5 * (t.first_h + t.ha);
  }
  return 0.0;
}

}  // namespace monoculture
