#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pdh/field.hpp"
#include "pdh/littlewood_paley.hpp"
#include "pdh/models.hpp"
#include "pdh/trajectory.hpp"

namespace pdh {

/// lambda v + u_x.
Field damped_mode(const SystemState& state, double lambda);

struct FunctionalSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string label;
};

enum class Component { both, first, second };

/// besov_norm at every stored time. `both` sums the two component norms.
FunctionalSeries besov_series(const Trajectory& traj, const DyadicDecomposition& d, const NormSpec& spec,
                              Side side = Side::full, int J = 0, Component component = Component::both);

// ---------------------------------------------------------------------------
// Global functional

/// The six terms of X_{p,lambda}(t), each already multiplied by its power of lambda.
struct XTerms {
  double low_sup = 0.0;     // sup_t ||(u,v)||^l  B^{1/p}_{p,1}
  double high_sup = 0.0;    // lambda^{-1} sup_t ||(u,v)||^h  B^{3/2}_{2,1}
  double low_l1 = 0.0;      // lambda^{-1} int ||u||^l  B^{1/p+2}_{p,1}
  double high_l1 = 0.0;     // int ||(u,v)||^h  B^{3/2}_{2,1}
  double damped_l1 = 0.0;   // int ||lambda v + u_x||  B^{1/p}_{p,1}
  double v_l2 = 0.0;        // lambda^{1/2} (int ||v||^2  B^{1/p}_{p,1})^{1/2}

  double total() const { return low_sup + high_sup + low_l1 + high_l1 + damped_l1 + v_l2; }
};

/// X_{p,lambda}(t) at every stored time t, split into terms. Low and high parts are cut
/// at J_lambda = floor(log2 lambda) + k. Time integrals use the trapezoid rule.
std::vector<XTerms> X_p_lambda_terms(const Trajectory& traj, const DyadicDecomposition& d, double p,
                                     double lambda, int k);

/// X_{p,lambda} at the last stored time.
double X_p_lambda(const Trajectory& traj, const DyadicDecomposition& d, double p, double lambda, int k);

FunctionalSeries X_p_lambda_series(const Trajectory& traj, const DyadicDecomposition& d, double p,
                                   double lambda, int k);

/// lambda = 1 functional with threshold J0, evaluated directly from besov_norm and
/// running_trapezoid. Kept separate from X_p_lambda so the two can be compared.
double X_p(const Trajectory& traj, const DyadicDecomposition& d, double p, int J0);

// ---------------------------------------------------------------------------
// Lyapunov functionals

enum class LyapunovVariant { toy, euler, general };

struct LyapunovSpec {
  LyapunovVariant variant = LyapunovVariant::toy;
  double lambda = 1.0;
  double eta = 0.1;
  int J0 = -2;
  /// Used by the euler variant: weight 1 + S_{j-1} G(n) on (V_j)_x^2 for j >= J0.
  PressureLaw pressure = PressureLaw::gamma_law(1.4);
  /// Used by the general variant: weights 1 + V2(v) on (u_j)_x^2 and 1 + W1(u,v) on (v_j)_x^2
  /// for j >= J0. The state is expected in normalized variables.
  GeneralConfig general;
};

struct LyapunovValue {
  double L = 0.0;  // L~
  double H = 0.0;  // H~
};

/// Squared block functional
///   ||u_j||^2 + ||v_j||^2 + ||u_j'||^2 + ||v_j'||^2 + int v_j u_j'
/// with x-derivatives measured in units of lambda (d/dx -> lambda^{-1} d/dx).
double lyapunov_block_squared(const SystemState& state, const DyadicDecomposition& d, int j,
                              const LyapunovSpec& spec);

/// L~ = sum 2^{j/2} L_j + eta lambda^{-1} ||lambda v + u_x||^l_{B^{1/2}_{2,1}} and
/// H~ = sum 2^{j/2} min(1, 2^{2j} / lambda^2) L_j + the same damped-mode term.
LyapunovValue lyapunov(const SystemState& state, const DyadicDecomposition& d, const LyapunovSpec& spec);

FunctionalSeries lyapunov_series(const Trajectory& traj, const DyadicDecomposition& d, const LyapunovSpec& spec,
                                 bool dissipation = false);

// ---------------------------------------------------------------------------
// Decay

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::pair<double, double> window;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

/// Least-squares line of log(value) against log(1 + kappa0 lambda t) over samples with t in
/// [t_a, t_b]. Needs at least 8 samples, all positive.
DecayFit decay_fit(const FunctionalSeries& series, std::pair<double, double> window, double kappa0,
                   double lambda = 1.0);

struct DataNorms {
  double low_neg = 0.0;   // ||(u0,v0)||^l  B^{-sigma1}_{2,inf}
  double low_half = 0.0;  // ||(u0,v0)||^l  B^{1/2}_{2,1}
  double high = 0.0;      // ||(u0,v0)||^h  B^{3/2}_{2,1}
};

struct DecayExponents {
  double sigma1 = 0.0;
  double sigma = 0.0;
  double alpha = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double theta0 = 0.0;
  double theta1 = 0.0;
  double kappa0 = 1.0;
  double C0_lambda = 0.0;
};

DecayExponents predicted_decay(double sigma1, double sigma, double lambda, const DataNorms& data);

/// Data norms entering kappa0 and C0_lambda, cut at J_lambda.
DataNorms decay_data_norms(const SystemState& data, const DyadicDecomposition& d, double sigma1, double lambda,
                           int k);

// ---------------------------------------------------------------------------
// Stability

/// delta U(t) = ||(du,dv)||^l_{B^{2/p-1/2}_{p,1}} + ||(du,dv)||^h_{B^{1/2}_{2,1}} cut at J0.
FunctionalSeries stability_metric(const Trajectory& a, const Trajectory& b, const DyadicDecomposition& d, double p,
                                  int J0);

}  // namespace pdh
