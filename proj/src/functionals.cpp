#include "pdh/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "pdh/spectral.hpp"

namespace pdh {

Field damped_mode(const SystemState& state, double lambda) {
  Field z = derivative(state.first);
  z += lambda * state.second;
  return z;
}

FunctionalSeries besov_series(const Trajectory& traj, const DyadicDecomposition& d, const NormSpec& spec,
                              Side side, int J, Component component) {
  FunctionalSeries out;
  out.label = "B[" + std::to_string(spec.s) + "," + std::to_string(spec.p) + "," + std::to_string(spec.r) + "]";
  out.times = traj.times();
  out.values.reserve(traj.size());
  for (const SystemState& s : traj.states()) {
    double v = 0.0;
    if (component != Component::second) v += d.besov_norm(s.first, spec, side, J);
    if (component != Component::first) v += d.besov_norm(s.second, spec, side, J);
    out.values.push_back(v);
  }
  return out;
}

namespace {

void check_exponent(double p) {
  if (!(p >= 2.0 && p <= 4.0)) throw RangeError("X_p needs 2 <= p <= 4");
}

void check_nonempty(const Trajectory& traj) {
  if (traj.empty()) throw RangeError("functional of an empty trajectory");
}

}  // namespace

std::vector<XTerms> X_p_lambda_terms(const Trajectory& traj, const DyadicDecomposition& d, double p,
                                     double lambda, int k) {
  check_exponent(p);
  check_nonempty(traj);
  const int J = j_threshold(lambda, k);
  const std::size_t n = traj.size();

  std::vector<double> low(n), high(n), low_reg(n), damped(n), v_sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SystemState& s = traj.states()[i];
    const RealArray up = d.block_norms(s.first, p);
    const RealArray vp = d.block_norms(s.second, p);
    const RealArray u2 = p == 2.0 ? up : d.block_norms(s.first, 2.0);
    const RealArray v2 = p == 2.0 ? vp : d.block_norms(s.second, 2.0);
    const RealArray zp = d.block_norms(damped_mode(s, lambda), p);
    low[i] = d.besov_from_blocks(up, 1.0 / p, 1.0, Side::low, J) + d.besov_from_blocks(vp, 1.0 / p, 1.0, Side::low, J);
    high[i] = d.besov_from_blocks(u2, 1.5, 1.0, Side::high, J) + d.besov_from_blocks(v2, 1.5, 1.0, Side::high, J);
    low_reg[i] = d.besov_from_blocks(up, 1.0 / p + 2.0, 1.0, Side::low, J);
    damped[i] = d.besov_from_blocks(zp, 1.0 / p, 1.0, Side::full, J);
    const double vn = d.besov_from_blocks(vp, 1.0 / p, 1.0, Side::full, J);
    v_sq[i] = vn * vn;
  }

  const auto& t = traj.times();
  const std::vector<double> I_low_reg = running_trapezoid(t, low_reg);
  const std::vector<double> I_high = running_trapezoid(t, high);
  const std::vector<double> I_damped = running_trapezoid(t, damped);
  const std::vector<double> I_v = running_trapezoid(t, v_sq);

  std::vector<XTerms> out(n);
  double sup_low = 0.0, sup_high = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sup_low = std::max(sup_low, low[i]);
    sup_high = std::max(sup_high, high[i]);
    XTerms& x = out[i];
    x.low_sup = sup_low;
    x.high_sup = sup_high / lambda;
    x.low_l1 = I_low_reg[i] / lambda;
    x.high_l1 = I_high[i];
    x.damped_l1 = I_damped[i];
    x.v_l2 = std::sqrt(lambda * I_v[i]);
  }
  return out;
}

double X_p_lambda(const Trajectory& traj, const DyadicDecomposition& d, double p, double lambda, int k) {
  return X_p_lambda_terms(traj, d, p, lambda, k).back().total();
}

FunctionalSeries X_p_lambda_series(const Trajectory& traj, const DyadicDecomposition& d, double p,
                                   double lambda, int k) {
  FunctionalSeries out;
  out.label = "X_p_lambda";
  out.times = traj.times();
  for (const XTerms& x : X_p_lambda_terms(traj, d, p, lambda, k)) out.values.push_back(x.total());
  return out;
}

double X_p(const Trajectory& traj, const DyadicDecomposition& d, double p, int J0) {
  check_exponent(p);
  check_nonempty(traj);
  const NormSpec base{1.0 / p, p, 1.0};
  const NormSpec reg{1.0 / p + 2.0, p, 1.0};
  const NormSpec top{1.5, 2.0, 1.0};

  double sup_low = 0.0, sup_high = 0.0;
  std::vector<double> a, b, c, e;
  for (const SystemState& s : traj.states()) {
    sup_low = std::max(sup_low, besov_norm(s, d, base, Side::low, J0));
    sup_high = std::max(sup_high, besov_norm(s, d, top, Side::high, J0));
    a.push_back(d.besov_norm(s.first, reg, Side::low, J0));
    b.push_back(besov_norm(s, d, top, Side::high, J0));
    c.push_back(d.besov_norm(s.second + derivative(s.first), base));
    const double vn = d.besov_norm(s.second, base);
    e.push_back(vn * vn);
  }
  const auto& t = traj.times();
  return sup_low + sup_high + running_trapezoid(t, a).back() + running_trapezoid(t, b).back() +
         running_trapezoid(t, c).back() + std::sqrt(running_trapezoid(t, e).back());
}

// ---------------------------------------------------------------------------

namespace {

double weighted_square(const Field& f, const RealArray& weight) {
  const RealArray s = f.samples();
  return (weight * s * s).sum() * f.grid().dx();
}

}  // namespace

double lyapunov_block_squared(const SystemState& state, const DyadicDecomposition& d, int j,
                              const LyapunovSpec& spec) {
  const double inv = 1.0 / spec.lambda;
  const Field uj = d.block(state.first, j);
  const Field vj = d.block(state.second, j);
  const Field duj = inv * derivative(uj);
  const Field dvj = inv * derivative(vj);
  double sum = inner_product(uj, uj) + inner_product(vj, vj) + inner_product(vj, duj);

  if (spec.variant == LyapunovVariant::toy || j < spec.J0) {
    return sum + inner_product(duj, duj) + inner_product(dvj, dvj);
  }
  if (spec.variant == LyapunovVariant::euler) {
    const RealArray n = state.first.samples();
    RealArray g(n.size());
    for (Index i = 0; i < n.size(); ++i) g(i) = G_of_n(n(i), spec.pressure);
    const Field G = Field::from_samples(state.grid(), g);
    // S_{j-1} keeps the mean of G(n) on the torus
    const int J = std::clamp(j - 2, d.j_min() - 1, d.j_max());
    const RealArray weight = 1.0 + G.mean() + d.lowpass(G, J).samples();
    return sum + inner_product(duj, duj) + weighted_square(dvj, weight);
  }
  const RealArray u = state.first.samples();
  const RealArray v = state.second.samples();
  RealArray w_u(u.size()), w_v(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    w_u(i) = 1.0 + spec.general.V2(v(i));
    w_v(i) = 1.0 + spec.general.W1(u(i), v(i));
  }
  return sum + weighted_square(duj, w_u) + weighted_square(dvj, w_v);
}

LyapunovValue lyapunov(const SystemState& state, const DyadicDecomposition& d, const LyapunovSpec& spec) {
  if (!(spec.lambda > 0.0)) throw RangeError("lambda must be positive");
  LyapunovValue out;
  const double lam2 = spec.lambda * spec.lambda;
  for (int j = d.j_min(); j <= d.j_max(); ++j) {
    const double Lj = std::sqrt(std::max(0.0, lyapunov_block_squared(state, d, j, spec)));
    const double w = std::pow(2.0, 0.5 * j);
    out.L += w * Lj;
    out.H += w * std::min(1.0, std::pow(2.0, 2.0 * j) / lam2) * Lj;
  }
  const double damped =
      spec.eta / spec.lambda * d.besov_norm(damped_mode(state, spec.lambda), {0.5, 2.0, 1.0}, Side::low, spec.J0);
  out.L += damped;
  out.H += damped;
  return out;
}

FunctionalSeries lyapunov_series(const Trajectory& traj, const DyadicDecomposition& d, const LyapunovSpec& spec,
                                 bool dissipation) {
  FunctionalSeries out;
  out.label = dissipation ? "H" : "L";
  out.times = traj.times();
  for (const SystemState& s : traj.states()) {
    const LyapunovValue v = lyapunov(s, d, spec);
    out.values.push_back(dissipation ? v.H : v.L);
  }
  return out;
}

// ---------------------------------------------------------------------------

DecayFit decay_fit(const FunctionalSeries& series, std::pair<double, double> window, double kappa0,
                   double lambda) {
  if (series.times.size() != series.values.size()) throw AlignmentError("series times and values differ in length");
  if (!(window.first < window.second)) throw FitError("fit window must satisfy t_a < t_b");
  if (!(kappa0 > 0.0) || !(lambda > 0.0)) throw FitError("kappa0 and lambda must be positive");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < window.first || t > window.second) continue;
    if (!(series.values[i] > 0.0))
      throw FitError("nonpositive value " + std::to_string(series.values[i]) + " at t = " + std::to_string(t));
    x.push_back(std::log1p(kappa0 * lambda * t));
    y.push_back(std::log(series.values[i]));
  }
  if (x.size() < 8) throw FitError("decay fit needs at least 8 samples in the window, got " + std::to_string(x.size()));

  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit abscissae are degenerate");

  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.window = window;
  fit.samples = x.size();
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

DecayExponents predicted_decay(double sigma1, double sigma, double lambda, const DataNorms& data) {
  if (!(sigma1 > -0.5 && sigma1 <= 0.5)) throw RangeError("sigma1 must lie in (-1/2, 1/2]");
  if (!(sigma >= -sigma1 && sigma <= 0.5)) throw RangeError("sigma must lie in [-sigma1, 1/2]");
  if (!(lambda > 0.0)) throw RangeError("lambda must be positive");
  DecayExponents e;
  e.sigma1 = sigma1;
  e.sigma = sigma;
  e.alpha = 0.5 * (sigma + sigma1);
  e.alpha1 = 0.5 * (0.5 + sigma1);
  e.alpha2 = sigma1 + 0.5;
  e.theta0 = 2.0 / (2.5 + sigma1);
  e.theta1 = (0.5 - sigma) / (0.5 + sigma1);
  e.C0_lambda = std::pow(lambda, 1.0 + e.alpha2) * data.low_neg + data.high;
  const double num = lambda * data.low_half + data.high;
  e.kappa0 = e.C0_lambda > 0.0 ? std::pow(num / e.C0_lambda, 2.0 / (sigma1 + 0.5)) : 1.0;
  return e;
}

DataNorms decay_data_norms(const SystemState& data, const DyadicDecomposition& d, double sigma1, double lambda,
                           int k) {
  const int J = j_threshold(lambda, k);
  DataNorms n;
  n.low_neg = besov_norm(data, d, {-sigma1, 2.0, kInf}, Side::low, J);
  n.low_half = besov_norm(data, d, {0.5, 2.0, 1.0}, Side::low, J);
  n.high = besov_norm(data, d, {1.5, 2.0, 1.0}, Side::high, J);
  return n;
}

// ---------------------------------------------------------------------------

FunctionalSeries stability_metric(const Trajectory& a, const Trajectory& b, const DyadicDecomposition& d, double p,
                                  int J0) {
  if (a.grid() != b.grid()) throw AlignmentError("trajectories live on different grids");
  if (a.size() != b.size()) throw AlignmentError("trajectories hold different numbers of snapshots");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a.times()[i] - b.times()[i]) > 1e-12 * std::max(1.0, std::abs(a.times()[i])))
      throw AlignmentError("snapshot times differ at index " + std::to_string(i));
  if (!(p >= 1.0)) throw RangeError("p must be >= 1");

  FunctionalSeries out;
  out.label = "deltaU";
  out.times = a.times();
  const NormSpec low{2.0 / p - 0.5, p, 1.0};
  const NormSpec high{0.5, 2.0, 1.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    SystemState diff{b.states()[i].first - a.states()[i].first, b.states()[i].second - a.states()[i].second,
                     a.times()[i]};
    out.values.push_back(besov_norm(diff, d, low, Side::low, J0) + besov_norm(diff, d, high, Side::high, J0));
  }
  return out;
}

}  // namespace pdh
