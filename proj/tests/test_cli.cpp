#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "monoculture/cli.hpp"

using namespace monoculture;
using namespace monoculture::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "monoculture");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) v.push_back(line);
  return v;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> v;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, ',');) v.push_back(f);
  return v;
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("grid parsing") {
  const Grid g = Grid::parse("0.1:3:0.1\xC3\x97" "0.1:6:0.1");
  CHECK(g.theta_h.values().size() == 30);
  CHECK(g.theta_a.values().size() == 60);
  CHECK(g.theta_a.values().back() == doctest::Approx(6.0));
  const Grid x = Grid::parse("1:2:0.5 x 0.5:0.5:1");
  CHECK(x.theta_h.values() == std::vector<double>{1, 1.5, 2});
  CHECK(x.theta_a.values() == std::vector<double>{0.5});
  CHECK_THROWS_AS(Grid::parse("1:2:0.5"), ConfigError);
  CHECK_THROWS_AS(Grid::parse("0:2:0.5x1:2:1"), ConfigError);
  CHECK_THROWS_AS(Grid::parse("2:1:0.5x1:2:1"), ConfigError);
  CHECK_THROWS_AS(Grid::parse("1:2:0x1:2:1"), ConfigError);
  CHECK_THROWS_AS(Grid::parse("1:2x1:2:1"), ConfigError);
}

TEST_CASE("value parsing") {
  CHECK(parse_number_list("1, 0.5,0") == std::vector<double>{1, 0.5, 0});
  CHECK_THROWS_AS(parse_number_list("1,,0"), ConfigError);
  CHECK(parse_distribution("unit-uniform:5").size() == 5);
  CHECK(parse_distribution("uniform:0:1:4").hi() == 1);
  CHECK_THROWS_AS(parse_distribution("uniform:0:1:4.5"), ConfigError);
  CHECK_THROWS_AS(parse_distribution("normal:0:1"), ConfigError);
  RunConfig c;
  c.pool = "1,1,0";
  CHECK_THROWS_AS(c.values(), ConfigError);
  c.pool = "1,0";
  c.dist = "unit-uniform:3";
  CHECK_THROWS_AS(c.values(), ConfigError);
}

TEST_CASE("numbers round-trip through the CSV formatter") {
  for (double x : {0.1, 1.0 / 3, -7.6164e-4, 1e300, 5e-324}) {
    CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
  }
  std::ostringstream os;
  CsvWriter w(os, {"a", "b"});
  w.row({"x,y", "say \"hi\""});
  CHECK(os.str() == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
  CHECK_THROWS(w.row({"only one"}));
}

TEST_CASE("utilities command") {
  const Result r = invoke({"utilities", "--theta-h", "1", "--theta-a", "2"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0].rfind("family,theta_h,theta_a,u_first_A", 0) == 0);
  const auto f = fields(ls[1]);
  const UtilityTable t = exact_utility_table(2, 1, Family::mallows(), CandidatePool({1, 0.5, 0}));
  CHECK(std::stod(f[5]) == t.aa);
  CHECK(f[15] == "exact");
}

TEST_CASE("a one-cell grid gives one row") {
  const Result r = invoke({"sweep", "--grid", "1:1:0.1x2:2:0.1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "theta_h,theta_a,phi_h,phi_a,label,p_mixed,welfare_aa,welfare_hh,braess,sequence,binary_value,error");
  CHECK(fields(ls[1])[0] == "1");
  CHECK(fields(ls[1])[1] == "2");
}

TEST_CASE("Monte Carlo CSV is byte-identical across thread counts") {
  const std::vector<std::string> base = {"sweep",  "--family", "rum",     "--noise",  "laplacian", "--dist",
                                         "uniform-centered:1:4", "--grid", "0.5:1:0.5x0.5:1.5:0.5", "--samples",
                                         "20000",  "--seed",   "42"};
  auto with_threads = [&](const char* n) {
    auto args = base;
    args.push_back("--threads");
    args.push_back(n);
    return invoke(args);
  };
  const Result one = with_threads("1");
  const Result three = with_threads("3");
  REQUIRE(one.code == 0);
  CHECK(lines(one.out).size() == 7);
  CHECK(one.out == three.out);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"utilities", "--theta-h", "1"}).code == ExitCode::kUsage);
  CHECK(invoke({"bogus"}).code == ExitCode::kUsage);
  CHECK(invoke({"utilities", "--family", "rum", "--engine", "exact", "--dist", "unit-uniform:5", "--theta-h", "1",
                "--theta-a", "1"})
            .code == ExitCode::kUsage);
  CHECK(invoke({"reproduce", "nonexistent"}).code == ExitCode::kUsage);
  CHECK(invoke({"reproduce", "--list"}).code == ExitCode::kSuccess);
  // Preference for the first position fails for the discrete counterexample.
  const Result fail = invoke({"conditions", "--family", "rum", "--noise", "discrete:1@0.05,0@0.9,-1@0.05", "--pool",
                              "1.75,0.5,0", "--theta-h", "1"});
  CHECK(fail.code == ExitCode::kFailure);
  CHECK(fail.out.find("fails") != std::string::npos);
  // Plackett-Luce never reaches theta star.
  CHECK(invoke({"braess-search", "--family", "pl", "--theta-h", "1"}).code == ExitCode::kNumerical);
  CHECK(invoke({"reproduce", "counterexample-b1"}).code == ExitCode::kSuccess);
}

TEST_CASE("counterexample row") {
  const auto path = temp_file("monoculture_b1.csv");
  const Result r = invoke({"reproduce", "counterexample-b1", "--out", path.string()});
  REQUIRE(r.code == 0);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto ls = lines(buf.str());
  REQUIRE(ls.size() == 2);
  CHECK(std::stod(fields(ls[1])[1]) == doctest::Approx(-0.00076).epsilon(0.01));
  std::filesystem::remove(path);
}

TEST_CASE("config file values are overridden by flags") {
  const auto path = temp_file("monoculture_test.cfg");
  {
    std::ofstream cfg(path);
    cfg << "pool=3,2,0\ntheta-h=0.5\ntheta-a=4\n";
  }
  const Result from_file = invoke({"utilities", "--config", path.string()});
  REQUIRE(from_file.code == 0);
  const auto f = fields(lines(from_file.out)[1]);
  CHECK(f[1] == "0.5");
  CHECK(f[2] == "4");
  CHECK(std::stod(f[3]) > 2);  // first pick from a pool topped by 3
  const Result overridden = invoke({"utilities", "--config", path.string(), "--theta-a", "1"});
  REQUIRE(overridden.code == 0);
  CHECK(fields(lines(overridden.out)[1])[2] == "1");
  std::filesystem::remove(path);
}

TEST_CASE("installed binary reports exit codes") {
  const char* bin = std::getenv("MONOCULTURE_BIN");
  if (!bin) return;
  auto status = [&](const std::string& args) {
    const int raw = std::system((std::string(bin) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("utilities --theta-h 1 --theta-a 2") == 0);
  CHECK(status("utilities") == 1);
  CHECK(status("braess-search --family pl --theta-h 1") == 3);
}
