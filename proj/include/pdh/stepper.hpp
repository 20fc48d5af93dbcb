#pragma once

#include "pdh/field.hpp"

namespace pdh {

/// Right-hand side split into an exactly integrated linear damping -lambda*second
/// and a non-stiff remainder (transport and nonlinear terms).
struct RhsSplit {
  StateDerivative stiff;
  StateDerivative nonstiff;

  StateDerivative total() const {
    return {stiff.first + nonstiff.first, stiff.second + nonstiff.second};
  }
};

class Model {
 public:
  virtual ~Model() = default;

  /// Damping coefficient applied to the second component.
  virtual double damping() const = 0;

  virtual StateDerivative nonstiff(const SystemState& state) const = 0;

  /// Largest characteristic speed over the grid, used for the advective CFL bound.
  virtual double max_speed(const SystemState& state) const = 0;

  RhsSplit rhs(const SystemState& state) const;
};

/// Largest imaginary-axis step of SSP-RK3 is sqrt(3); with k_max = pi/dx this
/// gives dt <= sqrt(3)/pi * dx / speed.
inline constexpr double kSspRk3StabilityCfl = 0.5513288954217921;
inline constexpr double kDefaultCfl = 0.4;

/// Advective step bound reported by the model for the current state.
double advective_dt_bound(const Model& model, const SystemState& state,
                          double cfl = kSspRk3StabilityCfl);

/// One integrating-factor SSP-RK3 step: e^{-lambda dt} on the damped component is exact,
/// the remaining terms are advanced by the three-stage Shu-Osher scheme.
SystemState step(const SystemState& state, const Model& model, double dt);

}  // namespace pdh
