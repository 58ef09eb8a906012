#include "monoculture/estimators.hpp"

#include <cmath>
#include <limits>

#include "monoculture/parallel.hpp"

namespace monoculture {

double EstimateWithError::z_score() const {
  if (std_error > 0.0) return mean / std_error;
  if (std::abs(mean) <= 1e-12) return 0.0;
  return mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

Verdict verdict_for(const EstimateWithError& e, double z_threshold) {
  const double z = e.z_score();
  if (z > z_threshold) return Verdict::holds;
  if (z < -z_threshold) return Verdict::fails;
  return Verdict::inconclusive;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::fails:
      return "fails";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "";
}

std::string to_string(Condition c) {
  switch (c) {
    case Condition::pref_first_position:
      return "pref_first_position";
    case Condition::pref_weaker_competition:
      return "pref_weaker_competition";
    case Condition::monotonicity:
      return "monotonicity";
  }
  return "";
}

std::string to_string(Engine e) { return e == Engine::exact ? "exact" : "mc"; }

Engine parse_engine(const std::string& text) {
  if (text == "exact") return Engine::exact;
  if (text == "mc") return Engine::mc;
  throw ArgumentError("unknown engine: " + text + " (expected exact or mc)");
}

bool exact_supported(const Family& family, const CandidateDistribution& values) {
  return family.exact_available(values.size()) && (values.is_fixed() || family.value_independent());
}

namespace {

// Shifted first and second moments of per-trial vectors.
struct Moments {
  explicit Moments(std::size_t k) : sum(k, 0.0), cross(k * k, 0.0) {}

  void add(const std::vector<double>& v, const std::vector<double>& shift) {
    const std::size_t k = sum.size();
    ++n;
    for (std::size_t i = 0; i < k; ++i) {
      const double a = v[i] - shift[i];
      sum[i] += a;
      for (std::size_t j = i; j < k; ++j) cross[i * k + j] += a * (v[j] - shift[j]);
    }
  }
  void merge(const Moments& o) {
    n += o.n;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += o.sum[i];
    for (std::size_t i = 0; i < cross.size(); ++i) cross[i] += o.cross[i];
  }

  std::size_t n = 0;
  std::vector<double> sum;
  std::vector<double> cross;  // upper triangle used
};

struct Summary {
  std::vector<double> mean;
  std::vector<double> cov;  // k x k
  std::size_t n;
};

// Runs options.n_samples trials; trial(rng, out) fills one vector.
template <class MakeTrial>
Summary run_trials(std::size_t k, const std::vector<double>& shift, const McOptions& options, MakeTrial make_trial) {
  if (options.n_samples < 1) throw ArgumentError("n_samples must be at least 1");
  const std::size_t chunks = std::max<std::size_t>(1, std::min(options.chunks, options.n_samples));
  std::vector<Moments> partial(chunks, Moments(k));
  parallel_for(chunks, options.threads, [&](std::size_t c) {
    Rng rng = make_stream(options.seed, c);
    auto trial = make_trial();
    std::vector<double> v(k);
    const std::size_t begin = options.n_samples * c / chunks;
    const std::size_t end = options.n_samples * (c + 1) / chunks;
    Moments& m = partial[c];
    for (std::size_t t = begin; t < end; ++t) {
      trial(rng, v);
      m.add(v, shift);
    }
  });
  Moments total(k);
  for (const Moments& m : partial) total.merge(m);
  Summary s{std::vector<double>(k), std::vector<double>(k * k, 0.0), total.n};
  const double n = static_cast<double>(total.n);
  for (std::size_t i = 0; i < k; ++i) s.mean[i] = shift[i] + total.sum[i] / n;
  if (total.n > 1) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) {
        const double c = (total.cross[i * k + j] - total.sum[i] * total.sum[j] / n) / (n - 1.0);
        s.cov[i * k + j] = c;
        s.cov[j * k + i] = c;
      }
    }
  }
  return s;
}

EstimateWithError contrast_of(const Summary& s, const std::vector<double>& coef) {
  const std::size_t k = s.mean.size();
  EstimateWithError e;
  e.n_samples = s.n;
  double var = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    e.mean += coef[i] * s.mean[i];
    for (std::size_t j = 0; j < k; ++j) var += coef[i] * coef[j] * s.cov[i * k + j];
  }
  e.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(s.n));
  return e;
}

int top_after(const std::vector<int>& order, int taken) { return order[0] != taken ? order[0] : order[1]; }

double shift_for(const CandidateDistribution& values) {
  const auto means = values.expected_order_statistics();
  double s = 0.0;
  for (double m : means) s += m;
  return s / static_cast<double>(means.size());
}

// Draws the trial's pool: the fixed pool, or a fresh draw from D.
class PoolSource {
 public:
  explicit PoolSource(const CandidateDistribution& values) : values_(values) {
    if (values.is_fixed()) fixed_.emplace(values.pool());
  }
  const CandidatePool& next(Rng& rng) {
    if (fixed_) return *fixed_;
    drawn_.emplace(values_.sample(rng));
    return *drawn_;
  }

 private:
  const CandidateDistribution& values_;
  std::optional<CandidatePool> fixed_;
  std::optional<CandidatePool> drawn_;
};

EstimateWithError exact_estimate(double value) { return {value, 0.0, 0}; }

}  // namespace

EstimateWithError McUtilityResult::contrast(const std::array<double, 6>& coefficients) const {
  Summary s{std::vector<double>(mean.begin(), mean.end()), std::vector<double>(36), n_samples};
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) s.cov[i * 6 + j] = covariance[i][j];
  return contrast_of(s, std::vector<double>(coefficients.begin(), coefficients.end()));
}

EstimateWithError McUtilityResult::entry(std::size_t k) const {
  std::array<double, 6> c{};
  c.at(k) = 1.0;
  return contrast(c);
}

McUtilityResult mc_utility_table(double theta_a, double theta_h, const Family& family,
                                 const CandidateDistribution& values, const McOptions& options) {
  const int n = values.size();
  const RankingSampler algo(RankingModelSpec(family, theta_a), n);
  const RankingSampler human(RankingModelSpec(family, theta_h), n);
  const std::vector<double> shift(6, shift_for(values));
  const Summary s = run_trials(6, shift, options, [&] {
    return [&, pools = PoolSource(values), sigma = std::vector<int>(), pi = std::vector<int>(),
            tau = std::vector<int>()](Rng& rng, std::vector<double>& v) mutable {
      const CandidatePool& pool = pools.next(rng);
      algo.sample_into(pool, rng, sigma);
      human.sample_into(pool, rng, pi);
      human.sample_into(pool, rng, tau);
      v[0] = pool.value(sigma[0]);
      v[1] = pool.value(tau[0]);
      v[2] = pool.value(sigma[1]);
      v[3] = pool.value(top_after(pi, sigma[0]));
      v[4] = pool.value(top_after(sigma, tau[0]));
      v[5] = pool.value(top_after(pi, tau[0]));
    };
  });
  McUtilityResult r;
  r.n_samples = s.n;
  for (std::size_t i = 0; i < 6; ++i) {
    r.mean[i] = s.mean[i];
    for (std::size_t j = 0; j < 6; ++j) r.covariance[i][j] = s.cov[i * 6 + j];
  }
  r.table = UtilityTable::from_array(r.mean);
  for (std::size_t i = 0; i < 6; ++i) r.table.errors[i] = r.entry(i).std_error;
  return r;
}

ConditionReport check_pref_first_position(const RankingModelSpec& spec, const CandidateDistribution& values,
                                          const McOptions& options, Engine engine) {
  ConditionReport report{Condition::pref_first_position, {}, Verdict::inconclusive, {}, {}};
  if (engine == Engine::exact) {
    const UtilityTable t = exact_utility_table(spec.theta(), spec.theta(), spec.family(), values);
    report.estimate = exact_estimate(t.ah - t.aa);
  } else {
    const RankingSampler sampler(spec, values.size());
    const Summary s = run_trials(1, {0.0}, options, [&] {
      return [&, pools = PoolSource(values), sigma = std::vector<int>(), pi = std::vector<int>()](
                 Rng& rng, std::vector<double>& v) mutable {
        const CandidatePool& pool = pools.next(rng);
        sampler.sample_into(pool, rng, sigma);
        sampler.sample_into(pool, rng, pi);
        v[0] = pi[0] != sigma[0] ? pool.value(pi[0]) - pool.value(pi[1]) : 0.0;
      };
    });
    report.estimate = contrast_of(s, {1.0});
  }
  report.verdict = verdict_for(report.estimate, options.z_threshold);
  return report;
}

ConditionReport check_pref_weaker_competition(const Family& family, double theta1, double theta2,
                                              const CandidateDistribution& values, const McOptions& options,
                                              Engine engine) {
  if (!(theta1 > theta2)) throw ArgumentError("weaker-competition check needs theta1 > theta2");
  ConditionReport report{Condition::pref_weaker_competition, {}, Verdict::inconclusive, {}, {}};
  if (engine == Engine::exact) {
    const UtilityTable t = exact_utility_table(theta1, theta2, family, values);
    report.estimate = exact_estimate(t.hh - t.ah);
  } else {
    const RankingSampler strong(RankingModelSpec(family, theta1), values.size());
    const RankingSampler weak(RankingModelSpec(family, theta2), values.size());
    const Summary s = run_trials(1, {0.0}, options, [&] {
      return [&, pools = PoolSource(values), sigma = std::vector<int>(), pi = std::vector<int>(),
              tau = std::vector<int>()](Rng& rng, std::vector<double>& v) mutable {
        const CandidatePool& pool = pools.next(rng);
        strong.sample_into(pool, rng, sigma);
        weak.sample_into(pool, rng, tau);
        weak.sample_into(pool, rng, pi);
        v[0] = pool.value(top_after(pi, tau[0])) - pool.value(top_after(pi, sigma[0]));
      };
    });
    report.estimate = contrast_of(s, {1.0});
  }
  report.verdict = verdict_for(report.estimate, options.z_threshold);
  return report;
}

ConditionReport check_monotonicity(const Family& family, const std::vector<double>& theta_grid, CandidateSet removed,
                                   const CandidateDistribution& values, const McOptions& options, Engine engine) {
  if (theta_grid.empty()) throw ArgumentError("monotonicity check needs a nonempty theta grid");
  for (std::size_t i = 1; i < theta_grid.size(); ++i) {
    if (!(theta_grid[i] > theta_grid[i - 1])) throw ArgumentError("theta grid must be increasing");
  }
  const int n = values.size();
  if ((removed.mask() & ~CandidateSet::all(n).mask()) != 0 || removed.size() >= n) {
    throw ArgumentError("removed set must be a proper subset of the candidates");
  }
  ConditionReport report{Condition::monotonicity, {}, Verdict::holds, {}, {}};
  const std::size_t g = theta_grid.size();
  if (engine == Engine::exact) {
    const CandidatePool pool = exact_pool(family, values);
    for (double theta : theta_grid) {
      report.points.push_back(exact_estimate(
          exact_selection_pmf(RankingModelSpec(family, theta), pool, removed).expected_value(pool)));
    }
    for (std::size_t i = 1; i < g; ++i) {
      report.steps.push_back(exact_estimate(report.points[i].mean - report.points[i - 1].mean));
    }
  } else {
    std::vector<RankingSampler> samplers;
    for (double theta : theta_grid) samplers.emplace_back(RankingModelSpec(family, theta), n);
    // Every grid point reuses the trial's pool and random stream, so
    // consecutive differences are paired.
    const Summary s = run_trials(g, std::vector<double>(g, shift_for(values)), options, [&] {
      return [&, pools = PoolSource(values), order = std::vector<int>()](Rng& rng, std::vector<double>& v) mutable {
        const CandidatePool& pool = pools.next(rng);
        const std::uint64_t trial_seed = rng();
        for (std::size_t i = 0; i < g; ++i) {
          Rng local(trial_seed);
          samplers[i].sample_into(pool, local, order);
          int top = 0;
          for (int c : order) {
            if (!removed.contains(c)) {
              top = c;
              break;
            }
          }
          v[i] = pool.value(top);
        }
      };
    });
    for (std::size_t i = 0; i < g; ++i) {
      std::vector<double> c(g, 0.0);
      c[i] = 1.0;
      report.points.push_back(contrast_of(s, c));
    }
    for (std::size_t i = 1; i < g; ++i) {
      std::vector<double> c(g, 0.0);
      c[i] = 1.0;
      c[i - 1] = -1.0;
      report.steps.push_back(contrast_of(s, c));
    }
  }
  if (report.steps.empty()) {
    report.estimate = report.points.front();
    return report;
  }
  bool any_fail = false;
  bool all_strict = true;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    const Verdict v = verdict_for(report.steps[i], options.z_threshold);
    any_fail = any_fail || v == Verdict::fails;
    all_strict = all_strict && v == Verdict::holds;
    if (report.steps[i].z_score() < report.steps[worst].z_score()) worst = i;
  }
  report.estimate = report.steps[worst];
  if (any_fail) {
    report.verdict = Verdict::fails;
  } else if (removed.empty() && !all_strict) {
    report.verdict = Verdict::inconclusive;
  } else {
    report.verdict = Verdict::holds;
  }
  return report;
}

}  // namespace monoculture
