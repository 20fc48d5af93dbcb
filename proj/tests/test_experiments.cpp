#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pdh/experiments.hpp"

using namespace pdh;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pdh_test_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

/// Small desk-top run: N = 512 on a torus of length 16 pi.
RunConfig small_run(const std::string& name) {
  RunConfig c;
  c.name = name;
  c.log2_points = 9;
  c.log2_periods = 3;
  c.horizon = 4.0;
  c.snapshot = 0.1;
  c.amplitude = 0.05;
  c.velocity = VelocityProfile::darcy;
  c.window_start = 0.5;
  return c;
}

}  // namespace

TEST_CASE("config parse and serialize") {
  const std::string text =
      "# toy run\n"
      "name = demo\n"
      "[model]\n"
      "kind = toy\n"
      "lambda = 4\n"
      "[grid]\n"
      "log2_points = 10\n"
      "log2_periods = 4\n"
      "[analysis]\n"
      "norms = B[0.5,2,1][low,-2]; v.B[-0.5,2,inf][low,0]\n";
  const auto doc = ConfigDocument::parse(text);
  CHECK(doc.get("model.lambda") == "4");
  CHECK(doc.get("grid.log2_points") == "10");

  SUBCASE("serialize is idempotent") {
    const std::string once = doc.serialize();
    CHECK(ConfigDocument::parse(once).serialize() == once);
    CHECK(ConfigDocument::parse(once) == doc);
  }
  SUBCASE("typed round trip") {
    const RunConfig cfg = parse_run_config(doc);
    CHECK(cfg.lambda == 4.0);
    REQUIRE(cfg.norms.size() == 2);
    CHECK(cfg.norms[1].component == Component::second);
    CHECK(cfg.norms[1].spec.r == kInf);
    const std::string full = to_document(cfg).serialize();
    CHECK(to_document(parse_run_config(ConfigDocument::parse(full))).serialize() == full);
  }
}

TEST_CASE("config errors name the key") {
  auto key_of = [](const std::string& text) {
    try {
      parse_run_config(ConfigDocument::parse(text));
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("none");
  };
  CHECK(key_of("[model]\nlambda = -1\n") == "model.lambda");
  CHECK(key_of("[model]\nlambda = abc\n") == "model.lambda");
  CHECK(key_of("[analysis]\np = 5\n") == "analysis.p");
  CHECK(key_of("[analysis]\nsigma1 = 0.7\n") == "analysis.sigma1");
  CHECK(key_of("[integrator]\nhorizon = 1e6\n") == "integrator.horizon");
  CHECK(key_of("[integrator]\ndt = 0.03\n") == "integrator.dt");
  CHECK(key_of("[model]\nkind = euler\nnonlinear = false\n") == "model.nonlinear");
  CHECK(key_of("[model]\ncolour = red\n") == "model.colour");
  CHECK(key_of("[analysis]\nnorms = B[0.5,2]\n") == "analysis.norms");
  CHECK_THROWS_AS(ConfigDocument::parse("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(ConfigDocument::parse("no equals sign\n"), ConfigError);
}

TEST_CASE("norm column labels") {
  const NormColumn c = NormColumn::parse("u.B[1.5,2,1][high,3]");
  CHECK(c.spec.s == 1.5);
  CHECK(c.side == Side::high);
  CHECK(c.J == 3);
  CHECK(c.component == Component::first);
  CHECK(c.label() == "u.B[1.5,2,1][high,3]");
  CHECK(NormColumn::parse(c.label()).label() == c.label());
  CHECK_THROWS_AS(NormColumn::parse("B[1,2,1][middle,0]"), ConfigError);
}

TEST_CASE("sweep config") {
  const auto doc = ConfigDocument::parse(
      "name = s\n[sweep]\naxis = sigma1\nvalues = 0.5, 0.25\nparallelism = 2\n[grid]\nlog2_points = 9\n"
      "log2_periods = 3\n[integrator]\nhorizon = 2\n");
  const SweepConfig s = parse_sweep_config(doc);
  CHECK(s.axis == SweepAxis::sigma1);
  CHECK(s.values.size() == 2);
  CHECK(s.parallelism == 2);
  const RunConfig c = s.cell(1);
  CHECK(c.sigma1 == 0.25);
  CHECK(c.envelope.s_low == -0.25);
  CHECK(c.name == "s_sigma1_1");
  const std::string text = to_document(s).serialize();
  CHECK(to_document(parse_sweep_config(ConfigDocument::parse(text))).serialize() == text);

  CHECK_THROWS_AS(parse_sweep_config(ConfigDocument::parse("[sweep]\naxis = lambda\nvalues = 1, -2\n")), ConfigError);
  CHECK_THROWS_AS(parse_sweep_config(ConfigDocument::parse("[sweep]\naxis = lambda\n")), ConfigError);
}

TEST_CASE("zero amplitude run is trivially passing") {
  RunConfig c = small_run("zero");
  c.amplitude = 0.0;
  c.norms = default_norms(c);
  const auto dir = scratch("zero");
  const RunResult r = run(c, dir);
  CHECK(r.pass);
  CHECK(r.summary["X"]["sup"].get<double>() == 0.0);
  CHECK(r.summary["lyapunov"]["monotone"].get<bool>());

  std::ifstream in(r.csv_path);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("t,", 0) == 0);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream cells(line.substr(line.find(',') + 1));
    std::string cell;
    while (std::getline(cells, cell, ',')) CHECK(std::stod(cell) == 0.0);
  }
  CHECK(rows == r.trajectory.size());
  CHECK(std::filesystem::exists(r.plot_path));
}

TEST_CASE("runs are deterministic") {
  const RunConfig c = small_run("det");
  const auto a = run(c, scratch("det_a"));
  const auto b = run(c, scratch("det_b"));
  CHECK(slurp(a.csv_path) == slurp(b.csv_path));
  CHECK(slurp(a.summary_path) == slurp(b.summary_path));
}

TEST_CASE("summary reports fitted and predicted decay side by side") {
  const RunConfig c = small_run("decay");
  const auto r = run(c, scratch("decay"));
  const auto& fits = r.summary["decay"]["fits"];
  REQUIRE(fits.size() == 3);
  const auto& low = fits[0];
  CHECK(low["norm"].get<std::string>() == "B[0.5,2,1][low,0]");
  CHECK(low["predicted"].get<double>() == doctest::Approx(-0.5));
  CHECK(std::isfinite(low["fitted"].get<double>()));
  CHECK(low["r_squared"].get<double>() > 0.5);
}

TEST_CASE("stored trajectories round trip") {
  RunConfig c = small_run("traj");
  c.horizon = 1.0;
  c.write_trajectory = true;
  const auto r = run(c, scratch("traj"));
  const Trajectory back = read_trajectory(r.trajectory_path);
  REQUIRE(back.size() == r.trajectory.size());
  CHECK(back.grid() == r.trajectory.grid());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.times()[i] == r.trajectory.times()[i]);
    CHECK((back.states()[i].first.coefficients() == r.trajectory.states()[i].first.coefficients()).all());
    CHECK((back.states()[i].second.coefficients() == r.trajectory.states()[i].second.coefficients()).all());
  }

  const std::string bad = r.trajectory_path + ".bad";
  {
    std::ofstream out(bad, std::ios::binary);
    out << "NOTATRAJ";
  }
  CHECK_THROWS_AS(read_trajectory(bad), FormatError);
  const std::string full = slurp(r.trajectory_path);
  {
    std::ofstream out(bad, std::ios::binary);
    out << full.substr(0, full.size() / 2);
  }
  CHECK_THROWS_AS(read_trajectory(bad), FormatError);
}

TEST_CASE("single element sweep matches a plain run") {
  SweepConfig s;
  s.base = small_run("single");
  s.axis = SweepAxis::lambda;
  s.values = {1.0};
  const auto dir = scratch("single");
  const SweepTable t = sweep(s, dir);
  REQUIRE(t.rows.size() == 1);
  REQUIRE(t.rows[0].ok);

  const RunConfig c = s.cell(0);
  const Trajectory traj = simulate_run(c);
  const auto d = DyadicDecomposition::build(CutoffProfile(), traj.grid());
  const auto direct = sweep_outputs(c, traj, d);
  for (const auto& [name, value] : direct) CHECK(t.rows[0].outputs.at(name) == value);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "single_sweep.csv"));
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "single_sweep.json"));
}

TEST_CASE("a failing sweep cell leaves the others intact") {
  SweepConfig s;
  s.base = small_run("iso");
  s.axis = SweepAxis::k;
  s.values = {0.0, 40.0, 1.0};
  s.parallelism = 2;
  const SweepTable t = sweep(s, scratch("iso"));
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].ok);
  CHECK_FALSE(t.rows[1].ok);
  CHECK(t.rows[1].error.find("analysis.k") != std::string::npos);
  CHECK(t.rows[2].ok);

  SweepConfig one = s;
  one.values = {1.0};
  const SweepTable alone = sweep(one, scratch("iso_alone"));
  CHECK(alone.rows[0].outputs == t.rows[2].outputs);
}

TEST_CASE("amplitude axis stays in the linear regime") {
  SweepConfig s;
  s.base = small_run("amp");
  s.axis = SweepAxis::amplitude;
  s.values = {0.02, 0.01, 0.005};
  const SweepTable t = sweep(s, scratch("amp"));
  double lo = kInf, hi = 0.0;
  for (const auto& row : t.rows) {
    REQUIRE(row.ok);
    lo = std::min(lo, row.outputs.at("X_ratio"));
    hi = std::max(hi, row.outputs.at("X_ratio"));
  }
  CHECK(hi / lo - 1.0 < 0.1);
  CHECK(t.slopes.at("X") == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("relaxation sweep reduces v") {
  SweepConfig s;
  s.base = small_run("relax");
  s.base.velocity = VelocityProfile::zero;
  s.base.envelope = Envelope{0.0, 1.5, 1, 0.0, 1.0, 8.0};
  s.axis = SweepAxis::lambda;
  s.values = {1.0, 4.0, 16.0};
  const SweepTable t = sweep(s, scratch("relax"));
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    CHECK(t.rows[i].outputs.at("v_L2") < t.rows[i - 1].outputs.at("v_L2"));
  CHECK(t.slopes.at("v_L2") < 0.0);
}

TEST_CASE("output directory override") {
  ::setenv("PDH_OUTPUT_DIR", "/tmp/pdh_override", 1);
  CHECK(output_directory("fallback") == "/tmp/pdh_override");
  ::unsetenv("PDH_OUTPUT_DIR");
  CHECK(output_directory("fallback") == "fallback");
}
