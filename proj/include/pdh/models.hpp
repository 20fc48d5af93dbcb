#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>

#include "pdh/field.hpp"
#include "pdh/stepper.hpp"
#include "pdh/trajectory.hpp"

namespace pdh {

// ---------------------------------------------------------------------------
// Toy model  u_t + v u_x + v_x = 0,  v_t + v v_x + u_x + lambda v = 0

struct ToyConfig {
  double lambda = 1.0;
  /// When false the transport terms v u_x, v v_x are dropped (linear system with w = 0).
  bool nonlinear = true;
};

RhsSplit toy_rhs(const SystemState& state, const ToyConfig& cfg);

/// Frozen-coefficient transport: u_t + w u_x + v_x = 0, v_t + w v_x + u_x + lambda v = 0.
RhsSplit ltm_rhs(const SystemState& state, const Field& w, double lambda);

class ToyModel : public Model {
 public:
  explicit ToyModel(ToyConfig cfg);
  double damping() const override { return cfg_.lambda; }
  StateDerivative nonstiff(const SystemState& state) const override;
  double max_speed(const SystemState& state) const override;
  const ToyConfig& config() const { return cfg_; }

 private:
  ToyConfig cfg_;
};

class LinearToyModel : public Model {
 public:
  LinearToyModel(Field w, double lambda);
  double damping() const override { return lambda_; }
  StateDerivative nonstiff(const SystemState& state) const override;
  double max_speed(const SystemState& state) const override;

 private:
  Field w_;
  RealArray w_samples_;
  double lambda_;
};

/// Decay rates of the mode exp(i xi x) for the linear system: the roots of
/// z^2 - lambda z + xi^2 = 0, slow root first. Positive real part means decay.
std::pair<std::complex<double>, std::complex<double>> linear_spectrum(double xi, double lambda);

// ---------------------------------------------------------------------------
// Damped Euler in (n, V) form: n_t + V n_x + (1 + G(n)) V_x = 0, V_t + V V_x + n_x + lambda V = 0

/// Pressure law normalized so that P'(1) = 1.
class PressureLaw {
 public:
  enum class Kind { gamma_law, general };

  /// P(rho) = rho^gamma / gamma.
  static PressureLaw gamma_law(double gamma);

  /// Law given by its derivative P'; P'(1) must equal 1.
  static PressureLaw general(std::function<double(double)> dP);

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  double a() const { return 1.0 / gamma_; }
  double dP(double rho) const;

 private:
  PressureLaw() = default;
  Kind kind_ = Kind::gamma_law;
  double gamma_ = 1.0;
  std::function<double(double)> dP_;
};

/// n(rho) = integral_1^rho P'(s)/s ds.
double n_from_rho(double rho, const PressureLaw& law);
double rho_from_n(double n, const PressureLaw& law);
/// G(n(rho)) = P'(rho) - 1.
double G_of_n(double n, const PressureLaw& law);

struct EulerConfig {
  double lambda = 1.0;
  PressureLaw pressure = PressureLaw::gamma_law(1.4);
};

/// Throws DomainError (carrying the state time) when n leaves the range of n(rho).
RhsSplit euler_rhs(const SystemState& state, const EulerConfig& cfg);

class EulerModel : public Model {
 public:
  explicit EulerModel(EulerConfig cfg) : cfg_(std::move(cfg)) {}
  double damping() const override { return cfg_.lambda; }
  StateDerivative nonstiff(const SystemState& state) const override;
  double max_speed(const SystemState& state) const override;

 private:
  EulerConfig cfg_;
};

// ---------------------------------------------------------------------------
// General system
//   u_t + alpha v_x + V1(v) u_x + W1(u,v) v_x = 0
//   v_t + beta u_x + V2(v) u_x + W2(u,v) v_x + lambda v + kappa lambda v^q = 0

struct GeneralConfig {
  using Fn1 = std::function<double(double)>;
  using Fn2 = std::function<double(double, double)>;

  double alpha = 1.0;
  double beta = 1.0;
  double lambda = 1.0;
  double kappa = 0.0;
  int q = 2;
  Fn1 V1 = [](double) { return 0.0; };
  Fn1 V2 = [](double) { return 0.0; };
  Fn2 W1 = [](double, double) { return 0.0; };
  Fn2 W2 = [](double, double) { return 0.0; };

  void validate() const;
};

RhsSplit general_rhs(const SystemState& state, const GeneralConfig& cfg);

class GeneralModel : public Model {
 public:
  explicit GeneralModel(GeneralConfig cfg);
  double damping() const override { return cfg_.lambda; }
  StateDerivative nonstiff(const SystemState& state) const override;
  double max_speed(const SystemState& state) const override;

 private:
  GeneralConfig cfg_;
};

/// Change of variables (u, v)(t, x) = (sqrt(alpha) u~, sqrt(beta) v~)(lambda t, lambda x / sqrt(alpha beta)).
struct GeneralScaling {
  double u_scale = 1.0;      // sqrt(alpha)
  double v_scale = 1.0;      // sqrt(beta)
  double time_scale = 1.0;   // tau = time_scale * t
  double space_scale = 1.0;  // y = space_scale * x

  GridSpec to_normalized(const GridSpec& g) const { return g.scaled(space_scale); }
  GridSpec from_normalized(const GridSpec& g) const { return g.scaled(1.0 / space_scale); }
  SystemState to_normalized(const SystemState& s) const;
  SystemState from_normalized(const SystemState& s) const;
  /// Maps d/dtau of the normalized unknowns to d/dt of the original ones.
  StateDerivative rate_from_normalized(const StateDerivative& d, const GridSpec& original) const;
  Trajectory from_normalized(const Trajectory& traj) const;
};

struct NormalizedGeneral {
  GeneralConfig config;  // alpha = beta = lambda = 1
  GeneralScaling scaling;
};

NormalizedGeneral normalize_general(const GeneralConfig& cfg);

// ---------------------------------------------------------------------------
// Rescaling (u, v)(t, x) = (u~, v~)(lambda t, lambda x) between lambda = 1 and lambda

/// Maps a lambda = 1 state on a torus of length L to the lambda state on `target`.
/// The target length must equal q L / lambda for a positive integer q (mode m goes to q m),
/// and the target grid must hold the mapped modes.
SystemState rescale_state(const SystemState& s, double lambda, const GridSpec& target);

/// Rescales every snapshot to the same number of points on a torus of length L / lambda.
Trajectory rescale_solution(const Trajectory& traj, double lambda);
Trajectory rescale_solution(const Trajectory& traj, double lambda, const GridSpec& target);

// ---------------------------------------------------------------------------
// Initial data

/// Per-mode amplitude law. Below xi_s = 2^J_split the block L^2 mass scales like
/// 2^{-j s_low} (flat in B^{s_low}_{2,inf}); above, like 2^{-j s_high}. A positive tilt
/// multiplies by (xi/xi_s)^{tilt} below and (xi/xi_s)^{-tilt} above, making the profile
/// summable. Modes outside [band_min, band_max] are left empty.
struct Envelope {
  double s_low = 0.0;
  double s_high = 1.0;
  int J_split = 0;
  double tilt = 0.0;
  double band_min = 0.0;
  double band_max = std::numeric_limits<double>::infinity();

  /// |c_m| for a field of unit amplitude at wavenumber xi on a torus of length L.
  double modulus(double xi, double length) const;
};

/// Random-phase data with mean zero, supported in the dealiasing band; deterministic in `seed`.
SystemState make_initial_data(const Envelope& envelope, double amplitude, std::uint64_t seed,
                              const GridSpec& grid);

}  // namespace pdh
