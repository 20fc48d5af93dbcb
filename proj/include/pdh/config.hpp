#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pdh/functionals.hpp"
#include "pdh/littlewood_paley.hpp"
#include "pdh/models.hpp"

namespace pdh {

/// Flat `key = value` text with dotted keys.
///
/// `#` starts a comment, and a `[section]` line prefixes the keys that follow with
/// `section.` (an empty `[]` clears the prefix). Keys are kept sorted, so serialize()
/// is a normal form: parse(serialize(doc)) == doc.
class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string& text);
  static ConfigDocument load(const std::string& path);

  std::string serialize() const;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  void set(const std::string& key, std::string value);
  void erase(const std::string& key) { values_.erase(key); }
  const std::map<std::string, std::string>& entries() const { return values_; }

  friend bool operator==(const ConfigDocument& a, const ConfigDocument& b) { return a.values_ == b.values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Typed, consuming view of a document. finish() rejects keys nobody asked for.
class ConfigReader {
 public:
  explicit ConfigReader(const ConfigDocument& doc) : doc_(doc) {}

  double number(const std::string& key, double fallback);
  int integer(const std::string& key, int fallback);
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback);
  bool flag(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback);
  /// Comma-separated reals.
  std::vector<double> numbers(const std::string& key);
  /// Semicolon-separated items, trimmed; empty items are dropped.
  std::vector<std::string> items(const std::string& key);

  void finish() const;

 private:
  const std::string* lookup(const std::string& key);

  const ConfigDocument& doc_;
  std::set<std::string> used_;
};

/// Shortest decimal text that parses back to the same double ("inf" for infinity).
std::string format_number(double x);

/// Parses a decimal real; throws ConfigError naming `key` on malformed text.
double parse_number(const std::string& text, const std::string& key);

// ---------------------------------------------------------------------------
// Norm columns

/// One tracked norm, written `B[s,p,r][side,J]`; a `u.` or `v.` prefix restricts it to
/// one component.
struct NormColumn {
  NormSpec spec;
  Side side = Side::full;
  int J = 0;
  Component component = Component::both;

  std::string label() const;
  static NormColumn parse(const std::string& text);
};

// ---------------------------------------------------------------------------
// Run and sweep configurations

enum class ModelKind { toy, euler, general };
/// Second component of the initial data: random like the first, zero, or -u_x / lambda.
enum class VelocityProfile { random, zero, darcy };

std::string to_string(ModelKind kind);
std::string to_string(VelocityProfile profile);

struct RunConfig {
  std::string name = "run";

  ModelKind model = ModelKind::toy;
  double lambda = 1.0;
  bool nonlinear = true;
  double gamma = 1.4;
  // general system with V1 = v1 v, V2 = v2 v, W1 = w1u u + w1v v, W2 = w2u u + w2v v
  double alpha = 1.0;
  double beta = 1.0;
  double kappa = 0.0;
  int q = 2;
  double v1 = 0.0, v2 = 0.0, w1u = 0.0, w1v = 0.0, w2u = 0.0, w2v = 0.0;

  int log2_points = 14;
  int log2_periods = 7;

  Envelope envelope{-0.5, 2.0, 0, 0.0};
  double amplitude = 0.1;
  std::uint64_t seed = 1;
  VelocityProfile velocity = VelocityProfile::random;

  double dt = 0.0;  // 0 selects the adaptive CFL step
  double cfl = kDefaultCfl;
  double relaxation = 0.5;
  double horizon = 40.0;
  double snapshot = 0.1;

  std::vector<NormColumn> norms;
  double p = 2.0;
  int k = 0;
  int J0 = -2;
  double eta = 0.1;
  double sigma1 = 0.5;
  double sigma = 0.5;
  double window_start = 2.0;
  double window_end = 0.0;  // 0 selects the end of the run
  double decay_tolerance = 0.15;
  double high_slope_margin = 0.2;
  double lyapunov_tolerance = 1e-6;

  bool write_trajectory = false;

  GridSpec grid() const { return GridSpec::dyadic(log2_points, log2_periods); }
  SimulationOptions simulation() const { return {horizon, snapshot, cfl, dt, relaxation}; }

  /// Throws ConfigError with the key path of the first violated rule.
  void validate() const;
};

RunConfig parse_run_config(const ConfigDocument& doc);
ConfigDocument to_document(const RunConfig& cfg);

enum class SweepAxis { lambda, sigma1, amplitude, k };

std::string to_string(SweepAxis axis);

struct SweepConfig {
  RunConfig base;
  SweepAxis axis = SweepAxis::lambda;
  std::vector<double> values;
  int parallelism = 1;

  /// Base configuration with the axis value applied.
  RunConfig cell(std::size_t i) const;

  void validate() const;
};

SweepConfig parse_sweep_config(const ConfigDocument& doc);
ConfigDocument to_document(const SweepConfig& cfg);

/// Largest time with exp(-(2 pi / L)^2 t) >= 0.8: beyond it the lowest torus mode has
/// lost a fifth of its mass and algebraic decay is no longer measurable.
double torus_window(const GridSpec& grid);

}  // namespace pdh
