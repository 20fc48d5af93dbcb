#include "pdh/stepper.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pdh {

RhsSplit Model::rhs(const SystemState& state) const {
  RhsSplit out{{Field::zero(state.grid()), -damping() * state.second}, nonstiff(state)};
  return out;
}

double advective_dt_bound(const Model& model, const SystemState& state, double cfl) {
  const double speed = model.max_speed(state);
  if (!(speed > 0.0)) return std::numeric_limits<double>::infinity();
  return cfl * state.grid().dx() / speed;
}

namespace {

// Applies the damping propagator over `tau` to the second component.
SystemState propagate(SystemState s, double lambda, double tau) {
  if (lambda != 0.0) s.second *= std::exp(-lambda * tau);
  return s;
}

SystemState euler_substep(const SystemState& s, const Model& model, double dt) {
  StateDerivative d = model.nonstiff(s);
  return SystemState(s.first + dt * d.first, s.second + dt * d.second, s.time);
}

SystemState combine(double a, const SystemState& x, double b, const SystemState& y, double t) {
  return SystemState(a * x.first + b * y.first, a * x.second + b * y.second, t);
}

bool finite(const Field& f) { return f.coefficients().allFinite(); }

}  // namespace

SystemState step(const SystemState& state, const Model& model, double dt) {
  if (!(dt > 0.0)) throw RangeError("time step must be positive");
  const double bound = advective_dt_bound(model, state);
  if (dt > bound * (1.0 + 1e-12))
    throw RangeError("time step " + std::to_string(dt) + " exceeds the advective bound " +
                     std::to_string(bound));

  const double lambda = model.damping();
  const double t = state.time;

  SystemState s1 = propagate(euler_substep(state, model, dt), lambda, dt);
  s1.time = t + dt;

  SystemState s2 = combine(0.75, propagate(state, lambda, 0.5 * dt), 0.25,
                           propagate(euler_substep(s1, model, dt), lambda, -0.5 * dt), t + 0.5 * dt);

  SystemState out =
      combine(1.0 / 3.0, propagate(state, lambda, dt), 2.0 / 3.0,
              propagate(euler_substep(s2, model, dt), lambda, 0.5 * dt), t + dt);

  if (!finite(out.first) || !finite(out.second)) throw BlowupDetected(t + dt);
  return out;
}

}  // namespace pdh
