#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdh/config.hpp"

namespace pdh {

using Json = nlohmann::ordered_json;

/// Initial state of a run: the envelope draws u (and v for the random profile).
SystemState make_run_data(const RunConfig& cfg);

std::unique_ptr<Model> make_model(const RunConfig& cfg);

/// Integrates the configured system without writing anything. Errors propagate.
Trajectory simulate_run(const RunConfig& cfg);

/// Norm columns written when a run requests none.
std::vector<NormColumn> default_norms(const RunConfig& cfg);

/// Values of one column at every snapshot.
std::vector<double> column_values(const Trajectory& traj, const DyadicDecomposition& d, const NormColumn& c);

struct RunResult {
  Trajectory trajectory;
  Json summary;
  bool pass = false;
  std::string csv_path;
  std::string summary_path;
  std::string plot_path;
  std::string trajectory_path;  // empty unless output.trajectory is set
};

/// Simulates, then writes <name>.csv, <name>.json and <name>.gp into `out_dir`.
/// BlowupDetected and DomainError are rethrown after the snapshots computed so far have
/// been written.
RunResult run(const RunConfig& cfg, const std::string& out_dir);

/// Functional summary of a finished trajectory (X_{p,lambda}, Lyapunov trace, decay fits).
Json summarize(const RunConfig& cfg, const Trajectory& traj, const DyadicDecomposition& d);

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  std::string error;
  std::map<std::string, double> outputs;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::lambda;
  std::vector<std::string> columns;
  std::vector<SweepRow> rows;
  /// Least-squares slope of log(output) against log(axis value) (k * log 2 on the k axis),
  /// over the rows that succeeded with a positive output.
  std::map<std::string, double> slopes;
};

/// Scalar outputs of one run: v_L2 = ||v||_{L^2_t(B^{1/p}_{p,1})}, u_drift =
/// sup_t ||u - u0||_{B^0_{p,1}}, X = X_{p,lambda}(T), X_ratio = X / data norm, and
/// low_neg_ratio = sup_t ||(u,v)||^l_{B^{-sigma1}_{2,inf}} / its value at t = 0.
std::map<std::string, double> sweep_outputs(const RunConfig& cfg, const Trajectory& traj,
                                            const DyadicDecomposition& d);

/// Runs every cell (writing its run artifacts), then <name>_sweep.csv and <name>_sweep.json.
/// A failing cell keeps its error message and leaves the other rows untouched.
SweepTable sweep(const SweepConfig& cfg, const std::string& out_dir);

double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Smallness threshold

struct SmallnessSearch {
  double c0 = 0.0;               // largest amplitude found admissible
  double reference_ratio = 0.0;  // X_{p,lambda}(T) / data norm in the linear regime
  double growth = 0.0;
  std::vector<std::pair<double, double>> probes;  // amplitude, ratio (inf when the run failed)
};

/// Bisection on data.amplitude. An amplitude is admissible when the run finishes and its
/// X ratio stays below growth times the ratio of a vanishing amplitude.
SmallnessSearch find_smallness(const RunConfig& base, double growth = 1.5, int iterations = 10);

// ---------------------------------------------------------------------------
// Trajectory files
//
// Layout (host byte order): "PDHTRAJ1", u64 points, f64 length, u64 snapshots, then per
// snapshot f64 time followed by the half spectra of u and v as (re, im) f64 pairs.

void write_trajectory(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory(const std::string& path);

/// Output directory: the PDH_OUTPUT_DIR environment variable when set, else `fallback`.
std::string output_directory(const std::string& fallback);

}  // namespace pdh
