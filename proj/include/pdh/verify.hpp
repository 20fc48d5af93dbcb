#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pdh/experiments.hpp"

namespace pdh {

/// One measured quantity against its limit.
struct Verdict {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", "<", ">=", "in", "==", "true"
  double limit = 0.0;
  double limit_hi = 0.0;  // upper end for "in"
  bool pass = false;
  std::string detail;

  static Verdict at_most(std::string name, double value, double limit, std::string detail = "");
  static Verdict below(std::string name, double value, double limit, std::string detail = "");
  static Verdict at_least(std::string name, double value, double limit, std::string detail = "");
  static Verdict within(std::string name, double value, double lo, double hi, std::string detail = "");
  static Verdict holds(std::string name, bool ok, std::string detail = "");
};

struct CriterionReport {
  int id = 0;
  std::string title;
  std::vector<Verdict> checks;
  double seconds = 0.0;
  std::string error;  // set when the criterion could not be evaluated

  bool pass() const;
  /// "[PASS] 3 rescaling identity: ..." with the worst check.
  std::string line() const;
};

struct SuiteReport {
  std::string suite;
  std::vector<CriterionReport> criteria;

  bool pass() const;
  Json to_json() const;
};

struct AcceptanceSetup {
  int log2_points = 13;
  int log2_periods = 7;
  /// Fraction of the smallness threshold c0 used as small data.
  double safety = 0.25;
  /// Where sweep artifacts of the relaxation criterion go.
  std::string out_dir = "acceptance_out";

  /// Small-data toy run shared by the simulation criteria (amplitude left at 1).
  RunConfig base() const;
};

/// Shares the smallness search and the small-data trajectories between criteria.
class AcceptanceContext {
 public:
  explicit AcceptanceContext(AcceptanceSetup setup = {});

  const AcceptanceSetup& setup() const { return setup_; }
  const SmallnessSearch& smallness();
  /// safety * c0
  double small_amplitude();
  /// Cached simulation of `cfg`.
  const Trajectory& trajectory(const RunConfig& cfg);

 private:
  AcceptanceSetup setup_;
  std::optional<SmallnessSearch> smallness_;
  std::map<std::string, std::unique_ptr<Trajectory>> runs_;
};

CriterionReport criterion_partition_of_unity();
CriterionReport criterion_linear_spectrum();
CriterionReport criterion_rescaling(AcceptanceContext& ctx);
/// Uses the context's small amplitude unless `amplitude` is given.
CriterionReport criterion_lyapunov(AcceptanceContext& ctx, std::optional<double> amplitude = {});
CriterionReport criterion_decay(AcceptanceContext& ctx);
CriterionReport criterion_negative_besov(AcceptanceContext& ctx);
CriterionReport criterion_relaxation(AcceptanceContext& ctx);
CriterionReport criterion_boundedness(AcceptanceContext& ctx);
CriterionReport criterion_inequality_lab();
CriterionReport criterion_stability(AcceptanceContext& ctx);

/// spectrum, rescaling, lyapunov, decay, relaxation, boundedness, inequalities, stability, acceptance.
const std::vector<std::string>& suite_names();

/// Runs a named suite. Unknown names throw RangeError; failing checks are verdicts.
SuiteReport verify_suite(const std::string& suite, AcceptanceContext& ctx);

void write_verdict(const SuiteReport& report, const std::string& path);

}  // namespace pdh
