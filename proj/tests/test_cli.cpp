#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "catalog.hpp"
#include "fabcr/asymptotics.hpp"
#include "fabcr/csv.hpp"
#include "fabcr/io.hpp"
#include "fabcr/priors.hpp"
#include "fabcr/regression.hpp"

using namespace fabcr;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(FABCR_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / ("fabcr_cli_" + std::to_string(getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("records survive a json round trip") {
  io::RegionRecord r{"laplace:kappa=1", 0.7, 1.0 / 3, 0.1, -2.5e-300, {{-1.0 / 7, 2.0 / 3}, {4.1, 5e10}}, 3.14159,
                     true, -1.2, 1.2, {{0.1, 0.2}, {0.30000000000000004, 1.0}}};
  CHECK(io::parse_region(io::to_json(r)) == r);
  io::NefRecord nf{"multinom:n=15,a=1|1|1", {5, 5, 5}, 0.05, {0.0, 0.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, true, 1, {}, {{0.2, 0.3, 0.5}}};
  CHECK(io::parse_nef(io::to_json(nf)) == nf);
  io::LimitsRecord l{"horseshoe", 2.0, 0.1, 0.0051087547991993439, {-3.2, 1.2}, {-1.2, 3.2}, 0.0, 4.4, 3.29};
  CHECK(io::parse_limits(io::to_json(l)) == l);
  io::RegressRecord rg{"horseshoe", 0.1, 1.7, true, true, 40, 2,
                       {{"x\"1", 0.5, 0.4, -0.1, 0.9, -0.2, 1.2, 0.71, false}, {"(intercept)", 1, 1, 0, 2, 0, 2, 1, true}}};
  CHECK(io::parse_regress(io::to_json(rg)) == rg);
  io::SimulateRecord sm{50, 10, 0.1, 100, "18446744073709551615", {{"z", 3.0, 0.6, 0.01, 0.9, 0.003}}};
  CHECK(io::parse_simulate(io::to_json(sm)) == sm);

  CHECK_THROWS_AS(io::parse_limits(io::to_json(r)), std::invalid_argument);
  std::string wrong_version = io::to_json(l);
  const auto pos = wrong_version.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  wrong_version.replace(pos, 12, "\"version\": 99");
  CHECK_THROWS_AS(io::parse_limits(wrong_version), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_region("{not json"), std::invalid_argument);
}

TEST_CASE("region subcommand") {
  const Run flat = run("region --prior flat --y 0 --alpha 0.1 --format json");
  REQUIRE(flat.code == 0);
  const io::RegionRecord r = io::parse_region(flat.out);
  CHECK(io::to_json(r) == flat.out);
  REQUIRE(r.intervals.size() == 1);
  const double z = oracle::Phi_inv_upper(0.05);
  CHECK(r.intervals[0].lo == doctest::Approx(-z).epsilon(1e-10));
  CHECK(r.intervals[0].hi == doctest::Approx(z).epsilon(1e-10));
  CHECK(r.z_hi == doctest::Approx(z).epsilon(1e-14));

  const io::RegionRecord g = io::parse_region(run("region --prior gaussian:tau=1 --y 1 --format json").out);
  CHECK(g.focal == doctest::Approx(0.5).epsilon(1e-12));

  const io::RegionRecord hs = io::parse_region(run("region --prior horseshoe --y 100 --format json").out);
  CHECK(hs.width / (hs.z_hi - hs.z_lo) == doctest::Approx(1.0).epsilon(0.05));

  const io::RegionRecord shifted = io::parse_region(run("region --prior horseshoe --y 3 --mu 2 --format json").out);
  const io::RegionRecord plain = io::parse_region(run("region --prior horseshoe --y 1 --format json").out);
  CHECK(shifted.intervals[0].lo == doctest::Approx(plain.intervals[0].lo + 2).epsilon(1e-12));

  const Run csv = run("region --prior flat --y 0");
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("prior,sigma,y,alpha,component,lo,hi", 0) == 0);
  CHECK(csv.out.find("1.6448536269514") != std::string::npos);
}

TEST_CASE("p-value curve output") {
  const auto dir = scratch();
  const auto file = dir / "pv.csv";
  const Run r = run("region --prior horseshoe --y 2 --pvalue-grid -1:3:0.5 --pvalue-out " + file.string() + " --format json");
  REQUIRE(r.code == 0);
  const io::RegionRecord rec = io::parse_region(r.out);
  REQUIRE(rec.pvalue_curve.size() == 9);
  const std::string text = slurp(file);
  CHECK(text.rfind("theta0,pvalue\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);
  for (const auto& pt : rec.pvalue_curve) {
    CHECK(pt.pvalue >= 0.0);
    CHECK(pt.pvalue <= 1.0);
    // θ₀ is in the 90% region exactly when p > 0.1
    const bool inside = std::any_of(rec.intervals.begin(), rec.intervals.end(),
                                    [&](const io::IntervalRec& iv) { return iv.lo <= pt.theta0 && pt.theta0 <= iv.hi; });
    if (std::fabs(pt.pvalue - 0.1) > 1e-6) CHECK(inside == (pt.pvalue > 0.1));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("nef subcommand") {
  const Run b = run("nef --family binom:n=8,a=1,b=1 --y 4 --format json");
  REQUIRE(b.code == 0);
  const io::NefRecord rec = io::parse_nef(b.out);
  CHECK(io::to_json(rec) == b.out);
  REQUIRE(rec.intervals.size() == 1);
  CHECK(rec.intervals[0].lo + rec.intervals[0].hi == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(rec.theta_hat[0] == doctest::Approx(0.5));
  CHECK(rec.focal_member);

  const io::NefRecord zero = io::parse_nef(run("nef --family binom:n=8,a=1,b=1 --y 0 --format json").out);
  CHECK(zero.intervals.front().lo <= 1e-4);

  const io::NefRecord m = io::parse_nef(run("nef --family 'multinom:n=15,a=1|1|1' --y 5,5,5 --step 0.05 --format json").out);
  CHECK(m.focal_member);
  CHECK_FALSE(m.members.empty());
  for (const auto& t : m.members) CHECK(t[0] + t[1] + t[2] == doctest::Approx(1.0));

  const auto dir = scratch();
  const auto grid = dir / "grid.csv";
  REQUIRE(run("nef --family binom:n=8,a=1,b=1 --y 4 --step 0.1 --grid-out " + grid.string()).code == 0);
  CHECK(slurp(grid) ==
        "theta,member\n0.10000000000000001,0\n0.20000000000000001,0\n0.29999999999999999,1\n0.40000000000000002,1\n"
        "0.5,1\n0.59999999999999998,1\n0.69999999999999996,1\n0.80000000000000004,0\n0.90000000000000002,0\n");
  std::filesystem::remove_all(dir);

  CHECK(run("nef --family binom:n=8,a=1,b=1 --y 9").code == 2);
  CHECK(run("nef --family binom:n=8,a=1,b=1 --y x").code == 2);
}

TEST_CASE("limits subcommand") {
  const Run r = run("limits --prior laplace:kappa=1 --alpha 0.1 --format json");
  REQUIRE(r.code == 0);
  const io::LimitsRecord l = io::parse_limits(r.out);
  const double c = l.c_alpha;
  CHECK(c == doctest::Approx(oracle::g_alpha_inv(0.1, -2.0)).epsilon(1e-10));
  CHECK(l.plus_infinity.lo == doctest::Approx(oracle::Phi_inv(0.1 * c)).epsilon(1e-10));
  CHECK(l.plus_infinity.hi == doctest::Approx(oracle::Phi_inv_upper(0.1 * (1 - c))).epsilon(1e-10));
  CHECK(l.minus_infinity.lo == doctest::Approx(-l.plus_infinity.hi).epsilon(1e-14));
  CHECK(l.focal_drift == doctest::Approx(1.0));
  CHECK(run("limits --prior gaussian:tau=1").code == 2);
  CHECK(run("limits --prior nonsense").code == 2);
}

TEST_CASE("regress subcommand matches the library") {
  const auto dir = scratch();
  const auto file = dir / "data.csv";
  {
    std::ofstream f(file);
    f << "y,a,b,c\n";
    for (int i = 0; i < 60; ++i) {
      const double a = std::sin(i * 0.7), b = std::cos(i * 1.3), cc = (i % 7) - 3.0;
      const double y = 2.0 * a - 0.5 * b + 0.01 * cc + 0.3 * std::sin(i * 5.1);
      f << y << ',' << a << ',' << b << ',';
      if (i == 5)
        f << "NA\n";
      else
        f << cc << '\n';
    }
  }
  const Run r = run("regress --csv " + file.string() +
                    " --response y --covariates a,b,c --impute-median --intercept --sigma2 estimate --format json");
  REQUIRE(r.code == 0);
  const io::RegressRecord rec = io::parse_regress(r.out);
  CHECK(rec.n == 60);
  CHECK(rec.p == 4);
  CHECK(rec.sigma2_estimated);
  CHECK(rec.coverage_approximate);
  CHECK(rec.prior == "horseshoe");

  DesignOptions o;
  o.response = "y";
  o.covariates = {"a", "b", "c"};
  o.impute_median = true;
  o.intercept = true;
  const Design d = build_design(read_csv_file(file.string()), o);
  RegressionProblem prob = fit(d.X, d.Y);
  prob.names = d.names;
  const auto rows = all_marginal_regions(prob, PriorModel::parse("horseshoe"), 0.1);
  REQUIRE(rec.rows.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rec.rows[k].coef == rows[k].name);
    CHECK(rec.rows[k].lo == doctest::Approx(rows[k].region.lo()).epsilon(1e-12));
    CHECK(rec.rows[k].hi == doctest::Approx(rows[k].region.hi()).epsilon(1e-12));
  }
  CHECK(run("regress --csv " + file.string() + " --response y --covariates a,b,c --sigma2 1").code == 2);
  CHECK(run("regress --csv " + file.string() + " --response y --covariates a,b,zz --impute-median --sigma2 1").code ==
        2);
  CHECK(run("regress --csv /nonexistent.csv --response y --sigma2 1").code == 2);
  const Run known = run("regress --csv " + file.string() +
                        " --response y --covariates a,b,c --impute-median --sigma2 0.09 --prior flat --format json");
  REQUIRE(known.code == 0);
  for (const auto& row : io::parse_regress(known.out).rows) CHECK(row.width_ratio == doctest::Approx(1.0).epsilon(1e-8));
  std::filesystem::remove_all(dir);
}

TEST_CASE("simulate subcommand") {
  const auto dir = scratch();
  const auto cfg = dir / "sim.cfg";
  {
    std::ofstream f(cfg);
    f << "n = 30\np = 3\nreps = 5\nlog_sigma_beta = 0, 2\npriors = horseshoe; flat\nseed = 4\n";
  }
  const Run a = run("simulate --config " + cfg.string() + " --format json");
  const Run b = run("simulate --config " + cfg.string() + " --format json --serial");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const io::SimulateRecord rec = io::parse_simulate(a.out);
  CHECK(rec.cells.size() == 6);
  CHECK(rec.seed == "4");
  CHECK(rec.reps == 5);
  {
    std::ofstream f(cfg);
    f << "n = 30\nbogus = 1\n";
  }
  CHECK(run("simulate --config " + cfg.string()).code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("exit codes") {
  CHECK(run("--help").code == 0);
  CHECK(run("region --help").code == 0);
  CHECK(run("region --prior flat").code == 2);
  CHECK(run("region --prior flat --y 0 --alpha 1.5").code == 2);
  CHECK(run("region --prior flat --y 0 --format xml").code == 2);
  CHECK(run("region --prior horsehoe --y 0").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("region --prior bessel --y 1e300").code == 3);
  CHECK(run("region --prior horseshoe --y 1e140").code == 3);
}
