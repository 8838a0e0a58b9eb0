#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hardcore/experiment.hpp"

using namespace hardcore;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hardcore_test_" + name);
  fs::remove_all(p);
  return p;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), root).string();
    if (rel == "metadata.json") continue;
    std::ifstream is(e.path(), std::ios::binary);
    out[rel] = std::string(std::istreambuf_iterator<char>(is), {});
  }
  return out;
}

ExperimentConfig small_matern(const fs::path& out) {
  ExperimentConfig c;
  c.lambda = 0.05;
  c.dimension = 2;
  c.law = "deterministic";
  c.radius = 1.0;
  c.kernel = "all";
  c.core = {40.0};
  c.margin = 2.0;
  c.replications = 6;
  c.seed = 11;
  c.lags = {1.0, 1.5, 3.0};
  c.radius_grid = {0.5};
  c.analytic_lags = {3.0, 6.0};
  c.analytic_radius_grid = {0.5, 2.0};
  c.probes = 2048;
  c.volume_probes = 4096;
  c.output_dir = out.string();
  return c;
}

Curve power_curve(double amplitude, double injected) {
  Curve c;
  c.model = "isolated";
  c.statistic = "cover_covariance";
  for (double z : {100.0, 1000.0, 10000.0}) {
    c.x.push_back(z);
    c.y.push_back(amplitude * std::pow(z, -1.5));
    c.asymptote.push_back(injected * std::pow(z, -1.5));
  }
  return c;
}

}  // namespace

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> seen(100);
  parallel_for(seen.size(), 4, [&](std::size_t i) { seen[i]++; });
  for (auto& s : seen) CHECK(s.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
                  std::runtime_error);
}

TEST_CASE("z scores") {
  CHECK(z_score(1.5, 1.0, 0.25) == doctest::Approx(2.0));
  CHECK(std::isnan(z_score(1.5, 1.0, 0.0)));
  CHECK(std::isnan(z_score(1.5, 1.0, std::nan(""))));
}

TEST_CASE("compare_curves rejects mismatched grids") {
  Curve c;
  c.model = "random";
  c.statistic = "two_point";
  c.x = {1.0, 2.0};
  c.y = {0.1, 0.2};
  c.asymptote = {std::nan(""), std::nan("")};
  CovarianceEstimate e;
  e.lags = {1.0, 3.0};
  e.values = {0.1, 0.2};
  e.std_error = {0.01, 0.01};
  CHECK_THROWS_AS(compare_curves(c, e), std::invalid_argument);
  e.lags = {1.0, 2.0};
  const auto rows = compare_curves(c, e);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].z == doctest::Approx(0.0));
}

TEST_CASE("amplitude verdict catches an injected wrong amplitude") {
  CHECK(amplitude_verdict(power_curve(2.0, 2.0), 100.0, 10000.0, 0.1).pass);
  CHECK(amplitude_verdict(power_curve(2.0, 2.1), 100.0, 10000.0, 0.1).pass);
  CHECK_FALSE(amplitude_verdict(power_curve(2.0, 3.0), 100.0, 10000.0, 0.1).pass);
  CHECK_FALSE(amplitude_verdict(power_curve(2.0, 1.5), 100.0, 10000.0, 0.1).pass);
}

TEST_CASE("decay verdicts") {
  const Curve good = power_curve(2.0, 2.0);
  AsymptoticLaw law;
  law.kind = AsymptoticLaw::Kind::power_law;
  law.amplitude = 2.0;
  law.exponent = 1.5;
  CHECK(decay_verdict(good, DecayClass{DecayClass::Kind::power, 1.5}, law, 100.0, 10000.0, 0.15).pass);
  CHECK_FALSE(decay_verdict(good, DecayClass{DecayClass::Kind::power, 2.5}, law, 100.0, 10000.0, 0.15).pass);

  Curve bounded = good;
  AsymptoticLaw bound;
  bound.kind = AsymptoticLaw::Kind::exponential_bound;
  bound.amplitude = 1.0;
  bound.rate = 1e-3;
  bound.power = 1.0;
  for (std::size_t j = 0; j < bounded.x.size(); ++j) bounded.y[j] = 0.5 * bound.evaluate(bounded.x[j]);
  CHECK(decay_verdict(bounded, DecayClass{DecayClass::Kind::exponential, 0.0}, bound, 100.0, 10000.0, 0.15).pass);
  bounded.y[1] = 2.0 * bound.evaluate(bounded.x[1]);
  CHECK_FALSE(decay_verdict(bounded, DecayClass{DecayClass::Kind::exponential, 0.0}, bound, 100.0, 10000.0, 0.15).pass);
}

TEST_CASE("pointwise verdict") {
  std::vector<ComparisonRow> rows(3);
  rows[0].z = 1.0;
  rows[1].z = std::nan("");
  rows[2].z = -2.9;
  CHECK(pointwise_verdict(rows, 3.0).pass);
  rows[2].z = -3.1;
  CHECK_FALSE(pointwise_verdict(rows, 3.0).pass);
}

TEST_CASE("analytic curves report unavailable statistics per curve") {
  ExperimentConfig c = small_matern(scratch("d3"));
  c.dimension = 3;
  c.kernel = "isolated";
  c.lags = {1.0, 3.0};
  const auto curves = analytic_curves(c, c.lags, c.radius_grid, 1);
  bool saw_error = false, saw_ok = false;
  for (const Curve& k : curves) {
    if (k.model == "isolated" && k.statistic == "cover_covariance") {
      CHECK_FALSE(k.ok());
      saw_error = true;
    } else {
      CHECK(k.ok());
      saw_ok = true;
    }
  }
  CHECK(saw_error);
  CHECK(saw_ok);
}

TEST_CASE("a faint model has thinned covariance equal to the Boolean one") {
  ExperimentConfig c;
  c.lambda = 1e-5;
  c.dimension = 1;
  c.kernel = "isolated";
  const std::vector<double> lags{5.0, 50.0};
  const std::vector<double> grid{2.0};
  const auto curves = analytic_curves(c, lags, grid, 1);
  const Curve *orig = nullptr, *iso = nullptr;
  for (const Curve& k : curves) {
    if (k.statistic != "cover_covariance") continue;
    (k.model == "original" ? orig : iso) = &k;
  }
  REQUIRE(orig);
  REQUIRE(iso);
  for (std::size_t j = 0; j < lags.size(); ++j) CHECK(iso->y[j] == doctest::Approx(orig->y[j]).epsilon(1e-3));
}

TEST_CASE("simulate output is byte-identical for a fixed seed") {
  const fs::path dir = scratch("determinism");
  ExperimentConfig c = small_matern(dir);
  c.replications = 3;
  std::ostringstream log;
  REQUIRE(run_simulate(c, 1, log) == 0);
  const auto first = read_tree(dir);
  fs::remove_all(dir);
  REQUIRE(run_simulate(c, 2, log) == 0);
  const auto second = read_tree(dir);
  CHECK(first.size() == second.size());
  CHECK(first == second);
  CHECK(first.count("grains/rep0000_original.csv") == 1);
  CHECK(first.count("grains/rep0002_small.csv") == 1);
  CHECK(first.count("summary.json") == 1);
  CHECK(fs::exists(dir / "metadata.json"));

  c.seed = 12;
  fs::remove_all(dir);
  REQUIRE(run_simulate(c, 1, log) == 0);
  CHECK(read_tree(dir).at("grains/rep0000_original.csv") != first.at("grains/rep0000_original.csv"));
  fs::remove_all(dir);
}

TEST_CASE("invalid configs fail before any output") {
  const fs::path dir = scratch("invalid");
  ExperimentConfig c = small_matern(dir);
  c.replications = 0;
  std::ostringstream log;
  CHECK_THROWS_AS(run_simulate(c, 1, log), ConfigError);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("compare report and injected errors") {
  const fs::path dir = scratch("compare");
  const ExperimentConfig c = small_matern(dir);
  const SimulationResult sim = simulate_and_estimate(c, 1);
  const auto pointwise = analytic_curves(c, c.lags, c.radius_grid, 1);
  const auto asymptotic = analytic_curves(c, c.analytic_lags, c.analytic_radius_grid, 1);
  const ComparisonReport report = build_report(c, sim, pointwise, asymptotic);
  std::size_t finite = 0, inside = 0;
  for (const auto& row : report.rows)
    if (std::isfinite(row.z)) {
      ++finite;
      if (std::abs(row.z) <= 3.0) ++inside;
    }
  CHECK(finite > 20);
  CHECK(static_cast<double>(inside) >= 0.9 * static_cast<double>(finite));
  const Verdict* original = nullptr;
  for (const auto& v : report.verdicts)
    if (v.rule == "pointwise" && v.model == "original" && v.statistic == "cover_covariance") original = &v;
  REQUIRE(original);
  CHECK(original->pass);

  auto broken = pointwise;
  for (Curve& k : broken)
    if (k.model == "original" && k.statistic == "cover_covariance")
      for (double& y : k.y) y *= 0.5;
  const ComparisonReport bad = build_report(c, sim, broken, asymptotic);
  CHECK_FALSE(bad.all_pass());
  for (const auto& v : bad.verdicts)
    if (v.rule == "pointwise" && v.model == "original" && v.statistic == "cover_covariance") CHECK_FALSE(v.pass);

  std::ostringstream csv;
  write_report_csv(csv, report);
  CHECK(csv.str().rfind("statistic,model,lag,analytic,empirical,stderr,asymptotic,z", 0) == 0);
  const std::string json = verdicts_json(report, "abc");
  CHECK(json.find("\"config_hash\"") != std::string::npos);

  std::ostringstream log;
  const int status = run_compare(c, 1, log);
  CHECK((status == 0 || status == 3));
  CHECK(status == (report.all_pass() ? 0 : 3));
  CHECK(fs::exists(dir / "report.csv"));
  CHECK(fs::exists(dir / "verdicts.json"));
  fs::remove_all(dir);
}

TEST_CASE("fit-tail on a curve file") {
  const fs::path dir = scratch("fit");
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "curve.csv");
    os.precision(17);
    os << "# synthetic\nlag,value\n";
    for (double z = 10.0; z <= 1000.0; z *= 2.0) os << z << "," << 3.0 * std::pow(z, -2.5) << "\n";
  }
  std::ostringstream log;
  CHECK(run_fit_tail(dir / "curve.csv", 10.0, 1000.0, dir / "fit.json", log) == 0);
  std::ifstream is(dir / "fit.json");
  const std::string text(std::istreambuf_iterator<char>(is), {});
  const auto at = text.find("\"slope\":");
  REQUIRE(at != std::string::npos);
  CHECK(std::stod(text.substr(at + 8)) == doctest::Approx(-2.5).epsilon(1e-12));
  fs::remove_all(dir);
}
