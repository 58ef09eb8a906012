#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "monoculture/cli.hpp"

namespace monoculture::cli {

namespace {

std::string fmt(double x) { return format_number(x); }
std::string fmt_bool(bool b) { return b ? "1" : "0"; }

UtilityTable table_with_errors(double theta_a, double theta_h, const Family& family,
                               const CandidateDistribution& values, Engine engine, const McOptions& options) {
  if (engine == Engine::exact) return exact_utility_table(theta_a, theta_h, family, values);
  const McUtilityResult r = mc_utility_table(theta_a, theta_h, family, values, options);
  UtilityTable t = r.table;
  for (std::size_t k = 0; k < 6; ++k) t.errors[k] = r.entry(k).std_error;
  return t;
}

int label_code(EquilibriumLabel label) {
  switch (label) {
    case EquilibriumLabel::HH:
      return 0;
    case EquilibriumLabel::AA:
      return 1;
    case EquilibriumLabel::AH_asymmetric:
      return 2;
  }
  return -1;
}

CandidateSet parse_removed(const std::string& text) {
  CandidateSet s;
  if (text.empty()) return s;
  for (double v : parse_number_list(text)) {
    if (v != static_cast<int>(v) || v < 1) throw ConfigError("--removed takes candidate indices >= 1");
    s.insert(static_cast<int>(v));
  }
  return s;
}

}  // namespace

void cmd_utilities(const RunConfig& config, std::ostream& csv) {
  const Family family = config.family_spec();
  const CandidateDistribution values = config.values();
  const Engine engine = config.engine_for(family, values);
  const double theta_h = config.resolved_theta_h();
  const double theta_a = config.resolved_theta_a();
  const McOptions options = config.mc_options();

  const UtilityTable t = table_with_errors(theta_a, theta_h, family, values, engine, options);
  std::vector<std::string> header = {"family", "theta_h", "theta_a"};
  for (const char* name : kUtilityNames) header.emplace_back(name);
  for (const char* name : kUtilityNames) header.push_back(std::string("se_") + (name + 2));
  header.insert(header.end(), {"engine", "n_samples", "seed"});
  CsvWriter w(csv, header);
  std::vector<std::string> row = {family.name(), fmt(theta_h), fmt(theta_a)};
  for (double v : t.as_array()) row.push_back(fmt(v));
  for (double e : t.errors) row.push_back(fmt(e));
  const bool mc = engine == Engine::mc;
  row.insert(row.end(), {to_string(engine), mc ? std::to_string(options.n_samples) : "0",
                         mc ? std::to_string(options.seed) : ""});
  w.row(row);
}

void write_sweep_csv(const std::vector<SweepCell>& cells, bool mallows, std::ostream& csv) {
  CsvWriter w(csv, {"theta_h", "theta_a", "phi_h", "phi_a", "label", "p_mixed", "welfare_aa", "welfare_hh", "braess",
                    "sequence", "binary_value", "error"});
  for (const SweepCell& c : cells) {
    std::vector<std::string> row = {fmt(c.theta_h), fmt(c.theta_a), mallows ? fmt(c.theta_h + 1) : "",
                                    mallows ? fmt(c.theta_a + 1) : ""};
    if (c.outcome) {
      const EquilibriumOutcome& o = *c.outcome;
      row.insert(row.end(), {to_string(o.label), o.p_mixed ? fmt(*o.p_mixed) : "", fmt(o.welfare_aa),
                             fmt(o.welfare_hh), fmt_bool(o.braess)});
    } else {
      row.insert(row.end(), {"", "", "", "", ""});
    }
    row.push_back(c.sequence);
    row.push_back(c.sequence.empty() ? "" : std::to_string(c.binary_value));
    row.push_back(c.error);
    w.row(row);
  }
}

void cmd_sweep(const RunConfig& config, std::ostream& csv, std::ostream* plot) {
  const auto grid = config.resolved_grid();
  if (!grid) throw ConfigError("sweep needs --grid lo:hi:step x lo:hi:step");
  if (config.k < 2) throw ConfigError("--k must be at least 2");
  const std::vector<double> hs = grid->theta_h.values();
  const std::vector<double> as = grid->theta_a.values();
  const CandidateDistribution values = config.values();

  std::vector<SweepCell> cells;
  if (config.k == 2) {
    const Family family = config.family_spec();
    const Engine engine = config.engine_for(family, values);
    cells = sweep_plane(hs, as, family, values, engine, config.mc_options());
  } else {
    if (!config.family_spec().is_mallows()) throw ConfigError("k-firm sweeps are implemented for Mallows only");
    if (config.k > values.size()) throw ConfigError("--k cannot exceed the number of candidates");
    std::vector<double> phi_h, phi_a;
    for (double h : hs) phi_h.push_back(h + 1.0);
    for (double a : as) phi_a.push_back(a + 1.0);
    cells = sweep_sequences(phi_h, phi_a, config.k, values, config.threads);
  }

  write_sweep_csv(cells, config.family_spec().is_mallows(), csv);

  if (plot) {
    *plot << (config.k == 2 ? "# theta_h theta_a label_code(HH=0,AA=1,AH=2) braess\n"
                            : "# theta_h theta_a binary_value\n");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const SweepCell& c = cells[i];
      if (i > 0 && i % as.size() == 0) *plot << '\n';
      *plot << fmt(c.theta_h) << ' ' << fmt(c.theta_a) << ' ';
      if (!c.error.empty()) {
        *plot << "nan" << (config.k == 2 ? " nan" : "") << '\n';
      } else if (config.k == 2) {
        *plot << label_code(c.outcome->label) << ' ' << (c.outcome->braess ? 1 : 0) << '\n';
      } else {
        *plot << c.binary_value << '\n';
      }
    }
  }
}

void cmd_sequential(const RunConfig& config, std::ostream& csv) {
  if (!config.family_spec().is_mallows()) throw ConfigError("the sequential game is implemented for Mallows only");
  const CandidateDistribution values = config.values();
  const double phi_a = config.resolved_phi_a();
  const double phi_h = config.resolved_phi_h();
  if (config.k < 1 || config.k > values.size()) throw ConfigError("--k must be between 1 and the number of candidates");
  const SequentialMallowsGame game(phi_a, phi_h, values);
  const StrategySequence optimal(game.optimal_sequence(config.k));
  StrategySequence seq = optimal;
  if (!config.sequence.empty()) {
    try {
      seq = StrategySequence::parse(config.sequence);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
    if (static_cast<int>(seq.size()) != config.k) throw ConfigError("--sequence length must equal --k");
  }
  const std::vector<double> u = game.utilities(seq.choices());
  CsvWriter w(csv, {"phi_h", "phi_a", "sequence", "binary_value", "optimal", "position", "strategy", "utility"});
  for (std::size_t i = 0; i < seq.size(); ++i) {
    w.row({fmt(phi_h), fmt(phi_a), seq.to_string(), std::to_string(seq.binary_value()),
           fmt_bool(seq == optimal), std::to_string(i + 1), std::string(1, to_char(seq.choices()[i])), fmt(u[i])});
  }
}

bool cmd_conditions(const RunConfig& config, std::ostream& csv) {
  const Family family = config.family_spec();
  const CandidateDistribution values = config.values();
  const Engine engine = config.engine_for(family, values);
  const McOptions options = config.mc_options();
  const double theta_h = config.resolved_theta_h();
  const bool weaker = config.theta_a || config.phi_a;
  const double theta_a = weaker ? config.resolved_theta_a() : 0.0;
  if (weaker && !(theta_a > theta_h)) throw ConfigError("preference for weaker competition needs theta_A > theta_H");
  std::vector<double> grid;
  if (!config.thetas.empty()) {
    grid = parse_number_list(config.thetas);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (!(grid[i] > grid[i - 1])) throw ConfigError("--thetas must be strictly increasing");
    }
    if (grid.size() < 2) throw ConfigError("--thetas needs at least two values");
  }
  const CandidateSet removed = parse_removed(config.removed);

  CsvWriter w(csv, {"condition", "theta_1", "theta_2", "estimate", "std_error", "z", "verdict", "engine", "n_samples"});
  bool ok = true;
  auto emit = [&](const ConditionReport& r, double t1, double t2) {
    const EstimateWithError& e = r.estimate;
    w.row({to_string(r.condition), fmt(t1), fmt(t2), fmt(e.mean), fmt(e.std_error), fmt(e.z_score()),
           to_string(r.verdict), to_string(engine), std::to_string(e.n_samples)});
    ok = ok && r.verdict != Verdict::fails;
  };
  emit(check_pref_first_position(RankingModelSpec(family, theta_h), values, options, engine), theta_h, theta_h);
  if (weaker) {
    emit(check_pref_weaker_competition(family, theta_a, theta_h, values, options, engine), theta_a, theta_h);
  }
  if (!grid.empty()) {
    emit(check_monotonicity(family, grid, removed, values, options, engine), grid.front(), grid.back());
  }
  return ok;
}

void cmd_braess_search(const RunConfig& config, std::ostream& csv) {
  const CandidateDistribution values = config.values();
  if (config.k > 2) {
    if (!config.family_spec().is_mallows()) throw ConfigError("k-firm search is implemented for Mallows only");
    if (config.k > values.size()) throw ConfigError("--k cannot exceed the number of candidates");
    const KFirmBraessReport r = kfirm_braess_check(config.k, config.resolved_phi_a(), config.resolved_phi_h(), values);
    std::string eq;
    for (int m : r.equilibria) eq += (eq.empty() ? "" : ";") + std::to_string(m);
    CsvWriter w(csv, {"k", "phi_a", "phi_h", "equilibria_num_a", "a_dominant", "utility_all_a", "utility_all_h",
                      "equilibrium_utility", "braess"});
    w.row({std::to_string(r.k), fmt(r.phi_a), fmt(r.phi_h), eq, fmt_bool(r.a_dominant), fmt(r.utility_all_a),
           fmt(r.utility_all_h), fmt(r.equilibrium_utility), fmt_bool(r.braess)});
    return;
  }
  const Family family = config.family_spec();
  const Engine engine = config.engine_for(family, values);
  const TableSource tables(family, values, engine, config.mc_options());
  const ThetaStarResult r = find_theta_star(config.resolved_theta_h(), tables, config.tol > 0 ? config.tol : 1e-6);
  CsvWriter w(csv, {"theta_h", "theta_star", "gap_at_star", "welfare_aa_at_star", "g_at_star", "theta_prime",
                    "dom1_margin", "dom2_margin", "welfare_aa_prime", "welfare_hh_prime", "message"});
  std::vector<std::string> row = {fmt(r.theta_h), fmt(r.theta_star), fmt(r.gap_at_star), fmt(r.welfare_aa_at_star),
                                  fmt(r.g_at_star)};
  if (r.theta_prime) {
    const DominanceFlags d = check_dominance(*r.table_at_prime);
    row.insert(row.end(), {fmt(*r.theta_prime), fmt(d.margin1), fmt(d.margin2),
                           fmt(exact_welfare(*r.table_at_prime, Profile::AA)),
                           fmt(exact_welfare(*r.table_at_prime, Profile::HH))});
  } else {
    row.insert(row.end(), {"", "", "", "", ""});
  }
  row.push_back(r.message);
  w.row(row);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monoculture and algorithmic hiring: utilities, equilibria and reproductions", "monoculture"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  // Values such as pools contain commas; never split them into arrays.
  auto config_format = std::make_shared<CLI::ConfigTOML>();
  config_format->arrayDelimiter('\x1f');
  app.config_formatter(config_format);

  RunConfig cfg;
  std::optional<std::size_t> samples;
  app.add_option("--family", cfg.family, "mallows | rum | plackett-luce")->capture_default_str();
  app.add_option("--noise", cfg.noise, "RUM noise: gaussian | laplacian | gumbel | discrete:v@p,...")
      ->capture_default_str();
  app.add_option("--theta-h", cfg.theta_h, "accuracy of the human rankings");
  app.add_option("--theta-a", cfg.theta_a, "accuracy of the algorithmic ranking");
  app.add_option("--phi-h", cfg.phi_h, "Mallows phi of the human rankings (theta + 1)");
  app.add_option("--phi-a", cfg.phi_a, "Mallows phi of the algorithm (theta + 1)");
  app.add_option("--k", cfg.k, "number of firms")->capture_default_str();
  app.add_option("--grid", cfg.grid, "theta_H and theta_A ranges, lo:hi:step x lo:hi:step");
  app.add_option("--pool", cfg.pool, "fixed candidate values, strictly decreasing (default 1,0.5,0)");
  app.add_option("--dist", cfg.dist, "uniform:lo:hi:n | uniform-centered:halfwidth:n | unit-uniform:n");
  app.add_option("--engine", cfg.engine, "exact | mc | auto")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Monte Carlo trials")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--sequence", cfg.sequence, "sequential: strategy string to evaluate, e.g. AHHAA");
  app.add_option("--thetas", cfg.thetas, "conditions: increasing theta grid for monotonicity, comma separated");
  app.add_option("--removed", cfg.removed, "conditions: removed candidates for monotonicity, comma separated");
  app.add_option("--tol", cfg.tol, "braess-search: bisection tolerance (default 1e-6)");
  app.add_option("--out", cfg.out, "write CSV here instead of standard output");
  app.add_option("--plot", cfg.plot, "sweep: also write a whitespace-separated data file for plotting");

  auto* utilities = app.add_subcommand("utilities", "utility table for one (theta_H, theta_A)");
  auto* sweep = app.add_subcommand("sweep", "equilibrium labels over a theta_H x theta_A grid (--k > 2: sequences)");
  auto* sequential = app.add_subcommand("sequential", "k-firm fixed-order Mallows game");
  auto* conditions = app.add_subcommand("conditions", "check preference for first position, weaker competition, "
                                                      "monotonicity");
  auto* braess = app.add_subcommand("braess-search", "locate theta_A* and a Braess witness (--k > 2: k-firm check)");
  auto* repro = app.add_subcommand("reproduce", "run a pinned reproduction target");
  auto* verify_cmd = app.add_subcommand("verify", "run an invariant suite");
  std::string target, suite;
  bool list = false;
  repro->add_option("target", target, "target name");
  repro->add_flag("--list", list, "list targets");
  verify_cmd->add_option("suite", suite, "suite name")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  std::unique_ptr<std::ofstream> file;
  auto csv_stream = [&]() -> std::ostream& {
    if (cfg.out.empty()) return out;
    file = std::make_unique<std::ofstream>(cfg.out);
    if (!*file) throw ConfigError("cannot open output file '" + cfg.out + "'");
    return *file;
  };

  try {
    if (*utilities) {
      std::ostringstream buf;
      cmd_utilities(cfg, buf);
      csv_stream() << buf.str();
    } else if (*sweep) {
      std::ostringstream buf, plot;
      cmd_sweep(cfg, buf, cfg.plot.empty() ? nullptr : &plot);
      csv_stream() << buf.str();
      if (!cfg.plot.empty()) {
        std::ofstream p(cfg.plot);
        if (!p) throw ConfigError("cannot open plot file '" + cfg.plot + "'");
        p << plot.str();
      }
    } else if (*sequential) {
      std::ostringstream buf;
      cmd_sequential(cfg, buf);
      csv_stream() << buf.str();
    } else if (*conditions) {
      std::ostringstream buf;
      const bool ok = cmd_conditions(cfg, buf);
      csv_stream() << buf.str();
      if (!ok) {
        err << "a condition fails\n";
        return kFailure;
      }
    } else if (*braess) {
      std::ostringstream buf;
      cmd_braess_search(cfg, buf);
      csv_stream() << buf.str();
    } else if (*repro) {
      const auto& targets = reproduce_targets();
      if (list || target.empty() || std::find(targets.begin(), targets.end(), target) == targets.end()) {
        if (!list) err << (target.empty() ? "missing target" : "unknown target '" + target + "'") << "\n";
        (list ? out : err) << "available targets:";
        for (const auto& t : targets) (list ? out : err) << ' ' << t;
        (list ? out : err) << '\n';
        return list ? kSuccess : kUsage;
      }
      std::ostringstream buf;
      const Report r = reproduce(target, cfg.threads, cfg.out.empty() ? nullptr : &buf);
      r.print(out);
      if (!cfg.out.empty()) csv_stream() << buf.str();
      return r.all_pass() ? kSuccess : kFailure;
    } else if (*verify_cmd) {
      const auto& suites = verify_suites();
      if (suite.empty() || std::find(suites.begin(), suites.end(), suite) == suites.end()) {
        err << "unknown suite '" << suite << "'; available:";
        for (const auto& s : suites) err << ' ' << s;
        err << '\n';
        return kUsage;
      }
      const Report r = verify(suite, cfg.threads);
      r.print(out);
      return r.all_pass() ? kSuccess : kFailure;
    }
  } catch (const BracketError& e) {
    err << "bracket error: " << e.what() << '\n';
    return kNumerical;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kSuccess;
}

}  // namespace monoculture::cli
