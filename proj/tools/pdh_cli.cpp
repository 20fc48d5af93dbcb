// pdh: command-line front end for runs, sweeps, verification suites and norm extraction.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pdh/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigFailure = 1;
constexpr int kAcceptanceFailure = 2;
constexpr int kRunFailure = 3;

std::vector<pdh::NormColumn> parse_columns(const std::string& text) {
  std::vector<pdh::NormColumn> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(pdh::NormColumn::parse(item));
  }
  if (out.empty()) throw pdh::ConfigError("norm", "no norm given");
  return out;
}

int simulate(const std::string& path, const std::string& out_dir) {
  const auto cfg = pdh::parse_run_config(pdh::ConfigDocument::load(path));
  const auto res = pdh::run(cfg, pdh::output_directory(out_dir));
  std::cout << "wrote " << res.csv_path << ", " << res.summary_path << ", " << res.plot_path << "\n";
  if (!res.trajectory_path.empty()) std::cout << "wrote " << res.trajectory_path << "\n";
  std::cout << "summary " << (res.pass ? "pass" : "fail") << "\n";
  return kOk;
}

int sweep(const std::string& path, const std::string& out_dir) {
  const auto cfg = pdh::parse_sweep_config(pdh::ConfigDocument::load(path));
  const auto table = pdh::sweep(cfg, pdh::output_directory(out_dir));
  std::size_t failed = 0;
  for (const auto& row : table.rows) {
    if (!row.ok) {
      ++failed;
      std::cerr << pdh::to_string(cfg.axis) << " = " << row.value << ": " << row.error << "\n";
    }
  }
  for (const auto& [name, slope] : table.slopes) std::cout << "slope " << name << " " << slope << "\n";
  std::cout << table.rows.size() - failed << "/" << table.rows.size() << " cells finished\n";
  return kOk;
}

int verify(const std::string& suite, const std::string& out_dir, int log2_points) {
  pdh::AcceptanceSetup setup;
  if (log2_points > 0) setup.log2_points = log2_points;
  const std::string dir = pdh::output_directory(out_dir);
  std::filesystem::create_directories(dir);
  setup.out_dir = dir;
  pdh::AcceptanceContext ctx(setup);
  const auto report = pdh::verify_suite(suite, ctx);
  for (const auto& c : report.criteria) std::cout << c.line() << std::endl;
  const std::string path = (std::filesystem::path(dir) / (suite + "_verdict.json")).string();
  pdh::write_verdict(report, path);
  std::cout << "verdict " << (report.pass() ? "pass" : "fail") << " -> " << path << "\n";
  return report.pass() ? kOk : kAcceptanceFailure;
}

int norms(const std::string& path, const std::string& spec) {
  const auto columns = parse_columns(spec);
  const auto traj = pdh::read_trajectory(path);
  const auto d = pdh::DyadicDecomposition::build(pdh::CutoffProfile(), traj.grid());
  std::vector<std::vector<double>> values;
  for (const auto& c : columns) values.push_back(pdh::column_values(traj, d, c));
  std::cout << "t";
  for (const auto& c : columns) std::cout << "," << c.label();
  std::cout << "\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::cout << pdh::format_number(traj.times()[i]);
    for (const auto& col : values) std::cout << "," << pdh::format_number(col[i]);
    std::cout << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped hyperbolic system experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir = "pdh_out";
  app.add_option("-o,--output", out_dir, "Output directory (PDH_OUTPUT_DIR takes precedence)");

  std::string config_path, suite, trajectory_path, norm_spec;
  int log2_points = 0;

  auto* sim = app.add_subcommand("simulate", "Run one configuration and write its artifacts");
  sim->add_option("config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);

  auto* swp = app.add_subcommand("sweep", "Run a parameter sweep");
  swp->add_option("config", config_path, "Sweep configuration file")->required()->check(CLI::ExistingFile);

  auto* ver = app.add_subcommand("verify", "Run a verification suite and write a verdict file");
  ver->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(pdh::suite_names()));
  ver->add_option("--log2-points", log2_points, "Grid size of the simulation criteria")->check(CLI::Range(8, 16));

  auto* nrm = app.add_subcommand("norms", "Print norm columns of a stored trajectory as CSV");
  nrm->add_option("trajectory", trajectory_path, "Trajectory file")->required()->check(CLI::ExistingFile);
  nrm->add_option("normspec", norm_spec, "Column labels such as B[0.5,2,1][low,-2], separated by ';'")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigFailure;
  }

  try {
    if (*sim) return simulate(config_path, out_dir);
    if (*swp) return sweep(config_path, out_dir);
    if (*ver) return verify(suite, out_dir, log2_points);
    return norms(trajectory_path, norm_spec);
  } catch (const pdh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const pdh::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const pdh::BlowupDetected& e) {
    std::cerr << "run failed: " << e.what() << " (partial artifacts written)\n";
    return kRunFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunFailure;
  }
}
