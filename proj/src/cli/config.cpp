#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "monoculture/cli.hpp"

namespace monoculture::cli {

namespace {

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + what + ": '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigError("invalid number for " + what + ": '" + text + "'");
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  const double v = parse_double(text, what);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(what + " must be an integer: '" + text + "'");
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else if (ch != ' ' && ch != '\t') {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

GridRange GridRange::parse(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError("grid range must be lo:hi:step, got '" + text + "'");
  GridRange r{parse_double(parts[0], "grid lo"), parse_double(parts[1], "grid hi"),
              parse_double(parts[2], "grid step")};
  if (!(r.lo > 0.0)) throw ConfigError("grid ranges must be positive: '" + text + "'");
  if (r.hi < r.lo) throw ConfigError("grid range has hi < lo: '" + text + "'");
  if (!(r.step > 0.0)) throw ConfigError("grid step must be positive: '" + text + "'");
  return r;
}

std::vector<double> GridRange::values() const {
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 10'000'000) throw ConfigError("grid has too many points");
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = lo + static_cast<double>(i) * step;
  return v;
}

Grid Grid::parse(const std::string& text) {
  static const std::string kTimes = "\xC3\x97";  // U+00D7
  std::size_t pos = text.find(kTimes);
  std::size_t len = kTimes.size();
  if (pos == std::string::npos) {
    pos = text.find_first_of("xX");
    len = 1;
  }
  if (pos == std::string::npos) throw ConfigError("grid must be 'lo:hi:step x lo:hi:step', got '" + text + "'");
  return {GridRange::parse(text.substr(0, pos)), GridRange::parse(text.substr(pos + len))};
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_double(part, "list entry"));
  return out;
}

CandidateDistribution parse_distribution(const std::string& text) {
  const auto parts = split(text, ':');
  const std::string& kind = parts[0];
  try {
    if (kind == "uniform" && parts.size() == 4) {
      return CandidateDistribution::uniform(parse_double(parts[1], "dist lo"), parse_double(parts[2], "dist hi"),
                                            parse_int(parts[3], "dist n"));
    }
    if (kind == "uniform-centered" && parts.size() == 3) {
      return CandidateDistribution::uniform_centered(parse_double(parts[1], "dist halfwidth"),
                                                     parse_int(parts[2], "dist n"));
    }
    if (kind == "unit-uniform" && parts.size() == 2) {
      return CandidateDistribution::unit_variance_uniform(parse_int(parts[1], "dist n"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown distribution '" + text +
                    "' (expected uniform:lo:hi:n, uniform-centered:halfwidth:n or unit-uniform:n)");
}

Family RunConfig::family_spec() const {
  try {
    return Family::parse(family, noise);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

CandidateDistribution RunConfig::values() const {
  if (!pool.empty() && !dist.empty()) throw ConfigError("give either --pool or --dist, not both");
  if (!dist.empty()) return parse_distribution(dist);
  try {
    return CandidatePool(parse_number_list(pool.empty() ? "1,0.5,0" : pool));
  } catch (const ConfigError&) {
    throw;
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("invalid pool: ") + e.what());
  }
}

Engine RunConfig::engine_for(const Family& fam, const CandidateDistribution& vals) const {
  const bool exact_ok = exact_supported(fam, vals);
  if (engine == "auto") return exact_ok ? Engine::exact : Engine::mc;
  Engine e;
  try {
    e = parse_engine(engine);
  } catch (const ArgumentError& err) {
    throw ConfigError(err.what());
  }
  if (e == Engine::exact && !exact_ok) {
    throw ConfigError("exact engine is not available for " + fam.name() + " with " + vals.describe() +
                      " (continuous RUMs need a fixed pool with n <= 3; use --engine mc)");
  }
  return e;
}

McOptions RunConfig::mc_options() const {
  if (samples < 2) throw ConfigError("--samples must be at least 2");
  McOptions o;
  o.n_samples = samples;
  o.seed = seed;
  o.threads = threads;
  return o;
}

namespace {

double resolve_theta(const std::optional<double>& theta, const std::optional<double>& phi, const std::string& family,
                     const char* name) {
  if (theta && phi) throw ConfigError(std::string("give either --theta-") + name + " or --phi-" + name + ", not both");
  if (phi) {
    if (Family::parse(family).kind() != Family::Kind::mallows) {
      throw ConfigError(std::string("--phi-") + name + " is only meaningful for the Mallows family");
    }
    return *phi - 1.0;
  }
  if (!theta) throw ConfigError(std::string("missing --theta-") + name);
  return *theta;
}

}  // namespace

double RunConfig::resolved_theta_h() const { return resolve_theta(theta_h, phi_h, family, "h"); }
double RunConfig::resolved_theta_a() const { return resolve_theta(theta_a, phi_a, family, "a"); }
double RunConfig::resolved_phi_h() const { return phi_h ? *phi_h : resolved_theta_h() + 1.0; }
double RunConfig::resolved_phi_a() const { return phi_a ? *phi_a : resolved_theta_a() + 1.0; }

std::optional<Grid> RunConfig::resolved_grid() const {
  if (grid.empty()) return std::nullopt;
  return Grid::parse(grid);
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), columns_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::logic_error("csv row has the wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      os_ << f;
      continue;
    }
    os_ << '"';
    for (char ch : f) {
      if (ch == '"') os_ << '"';
      os_ << ch;
    }
    os_ << '"';
  }
  os_ << '\n';
}

bool Report::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

void Report::print(std::ostream& os) const {
  os << "== " << title << '\n';
  for (const auto& c : checks) os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
  std::size_t passed = 0;
  for (const auto& c : checks) passed += c.pass ? 1 : 0;
  os << passed << "/" << checks.size() << " checks passed\n";
}

}  // namespace monoculture::cli
