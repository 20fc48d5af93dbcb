#include "pdh/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace pdh {

void Trajectory::append(SystemState s) {
  if (s.grid() != grid_) throw GridError("snapshot grid differs from the trajectory grid");
  if (!times_.empty() && !(s.time > times_.back()))
    throw RangeError("trajectory times must be strictly increasing");
  times_.push_back(s.time);
  states_.push_back(std::move(s));
  for (auto& [name, a] : accumulators_) push(a, states_.back(), states_.size() - 1);
}

void Trajectory::push(Accumulator& a, const SystemState& s, std::size_t index) {
  const double v = a.norm(s);
  const double w = a.kind == Accumulate::l1 ? v : v * v;
  if (index == 0) {
    a.running.push_back(0.0);
  } else {
    const double prev = a.kind == Accumulate::l1 ? a.values.back() : a.values.back() * a.values.back();
    a.running.push_back(a.running.back() + 0.5 * (times_[index] - times_[index - 1]) * (prev + w));
  }
  a.values.push_back(v);
}

void Trajectory::track(const std::string& name, Norm norm, Accumulate kind) {
  Accumulator a{std::move(norm), kind, {}, {}};
  for (std::size_t i = 0; i < states_.size(); ++i) push(a, states_[i], i);
  accumulators_[name] = std::move(a);
}

const Trajectory::Accumulator& Trajectory::find(const std::string& name) const {
  auto it = accumulators_.find(name);
  if (it == accumulators_.end()) throw RangeError("no accumulator named '" + name + "'");
  return it->second;
}

std::vector<double> Trajectory::accumulator(const std::string& name) const {
  const Accumulator& a = find(name);
  std::vector<double> out = a.running;
  if (a.kind == Accumulate::l2)
    for (double& x : out) x = std::sqrt(x);
  return out;
}

const std::vector<double>& Trajectory::samples(const std::string& name) const { return find(name).values; }

std::vector<double> running_trapezoid(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw AlignmentError("times and values differ in length");
  std::vector<double> out(times.size(), 0.0);
  for (std::size_t i = 1; i < times.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
  return out;
}

namespace {

int substeps_for(double interval, double dt) {
  return std::max(1, static_cast<int>(std::ceil(interval / dt - 1e-9)));
}

}  // namespace

void advance(Trajectory& traj, const Model& model, const SimulationOptions& opt) {
  if (traj.empty()) throw RangeError("cannot advance an empty trajectory");
  if (!(opt.snapshot_interval > 0.0)) throw RangeError("snapshot interval must be positive");
  if (!(opt.horizon >= 0.0)) throw RangeError("horizon must be nonnegative");
  if (!(opt.cfl > 0.0) || opt.cfl > kSspRk3StabilityCfl)
    throw RangeError("CFL number must lie in (0, sqrt(3)/pi]");

  const int snapshots = static_cast<int>(std::llround(opt.horizon / opt.snapshot_interval));
  int fixed_substeps = 0;
  if (opt.fixed_dt > 0.0) {
    const double ratio = opt.snapshot_interval / opt.fixed_dt;
    fixed_substeps = static_cast<int>(std::llround(ratio));
    if (fixed_substeps < 1 || std::abs(ratio - fixed_substeps) > 1e-9 * ratio)
      throw RangeError("fixed time step must divide the snapshot interval");
  }

  if (opt.relaxation < 0.0) throw RangeError("relaxation bound must be nonnegative");
  const double lambda = model.damping();
  auto bound = [&](const SystemState& st, double cfl) {
    const double b = advective_dt_bound(model, st, cfl);
    return (opt.relaxation > 0.0 && lambda > 0.0) ? std::min(b, opt.relaxation / lambda) : b;
  };

  SystemState s = traj.back();
  const double t0 = s.time;
  for (int k = 1; k <= snapshots; ++k) {
    const double target = t0 + k * opt.snapshot_interval;
    if (fixed_substeps > 0) {
      const double dt = opt.snapshot_interval / fixed_substeps;
      for (int i = 0; i < fixed_substeps; ++i) s = step(s, model, dt);
    } else {
      double remaining = target - s.time;
      int n = substeps_for(remaining, bound(s, opt.cfl));
      double dt = remaining / n;
      while (n > 0) {
        // the speed may grow inside an interval; shrink the step for the rest of it
        if (dt > bound(s, kSspRk3StabilityCfl)) {
          remaining = target - s.time;
          n = substeps_for(remaining, bound(s, opt.cfl));
          dt = remaining / n;
        }
        s = step(s, model, dt);
        --n;
      }
    }
    s.time = target;
    traj.append(s);
  }
}

Trajectory simulate(const SystemState& initial, const Model& model, const SimulationOptions& options) {
  Trajectory traj(initial.grid());
  traj.append(initial);
  advance(traj, model, options);
  return traj;
}

}  // namespace pdh
