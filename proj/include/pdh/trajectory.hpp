#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pdh/field.hpp"
#include "pdh/stepper.hpp"

namespace pdh {

/// Time-stamped snapshots plus running time integrals of tracked norms.
class Trajectory {
 public:
  enum class Accumulate { l1, l2 };
  using Norm = std::function<double(const SystemState&)>;

  explicit Trajectory(GridSpec grid) : grid_(grid) {}

  /// Appends a snapshot; times must be strictly increasing and the grid must match.
  void append(SystemState s);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<SystemState>& states() const { return states_; }
  const SystemState& front() const { return states_.front(); }
  const SystemState& back() const { return states_.back(); }

  /// Registers a running integral of `norm` (L^1_t) or of its square (reported as the
  /// square root, L^2_t). Already stored snapshots are accounted for immediately.
  void track(const std::string& name, Norm norm, Accumulate kind);

  bool tracks(const std::string& name) const { return accumulators_.count(name) != 0; }

  /// Running integral at every stored time (trapezoid rule, 0 at the first time).
  std::vector<double> accumulator(const std::string& name) const;

  /// Norm values sampled at every stored time.
  const std::vector<double>& samples(const std::string& name) const;

 private:
  struct Accumulator {
    Norm norm;
    Accumulate kind;
    std::vector<double> values;
    std::vector<double> running;  // integral of value (l1) or value^2 (l2)
  };

  void push(Accumulator& a, const SystemState& s, std::size_t index);
  const Accumulator& find(const std::string& name) const;

  GridSpec grid_;
  std::vector<double> times_;
  std::vector<SystemState> states_;
  std::map<std::string, Accumulator> accumulators_;
};

/// Trapezoid running integral of `values` sampled at `times`.
std::vector<double> running_trapezoid(const std::vector<double>& times, const std::vector<double>& values);

struct SimulationOptions {
  double horizon = 40.0;
  double snapshot_interval = 0.1;
  double cfl = kDefaultCfl;
  /// When positive, every step uses this dt (it must divide the snapshot interval).
  double fixed_dt = 0.0;
  /// When positive, adaptive steps also keep damping * dt <= relaxation. The integrating
  /// factor is stable for any damping, but the relaxed state v ~ -u_x / lambda is only
  /// tracked accurately once lambda dt is of order one.
  double relaxation = 0.0;
};

/// Integrates from the last stored state up to its time + horizon, appending a snapshot
/// every interval. On BlowupDetected the snapshots computed so far stay in `traj`.
void advance(Trajectory& traj, const Model& model, const SimulationOptions& options);

Trajectory simulate(const SystemState& initial, const Model& model, const SimulationOptions& options);

}  // namespace pdh
