#include "pdh/models.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <random>
#include <string>

#include "pdh/spectral.hpp"

namespace pdh {

namespace {

Field band_product(const GridSpec& g, const RealArray& a, const RealArray& b) {
  return from_band_samples(g, (a * b).eval());
}

// (-w u_x - v_x, -w v_x - u_x); the transport terms are skipped when w is null.
StateDerivative transport(const SystemState& s, const RealArray* w) {
  const Field du = derivative(s.first);
  const Field dv = derivative(s.second);
  if (!w) return {-dv, -du};
  const GridSpec& g = s.grid();
  return {-band_product(g, *w, band_samples(du)) - dv, -band_product(g, *w, band_samples(dv)) - du};
}

}  // namespace

// ---------------------------------------------------------------------------

ToyModel::ToyModel(ToyConfig cfg) : cfg_(cfg) {
  if (!(cfg.lambda > 0.0)) throw RangeError("toy model needs lambda > 0");
}

StateDerivative ToyModel::nonstiff(const SystemState& s) const {
  if (!cfg_.nonlinear) return transport(s, nullptr);
  const RealArray w = band_samples(s.second);
  return transport(s, &w);
}

double ToyModel::max_speed(const SystemState& s) const {
  if (!cfg_.nonlinear) return 1.0;
  return band_samples(s.second).abs().maxCoeff() + 1.0;
}

RhsSplit toy_rhs(const SystemState& state, const ToyConfig& cfg) {
  return ToyModel(cfg).rhs(state);
}

LinearToyModel::LinearToyModel(Field w, double lambda)
    : w_(std::move(w)), w_samples_(band_samples(w_)), lambda_(lambda) {}

StateDerivative LinearToyModel::nonstiff(const SystemState& s) const {
  w_.check_same_grid(s.first);
  return transport(s, &w_samples_);
}

double LinearToyModel::max_speed(const SystemState&) const { return w_samples_.abs().maxCoeff() + 1.0; }

RhsSplit ltm_rhs(const SystemState& state, const Field& w, double lambda) {
  return LinearToyModel(w, lambda).rhs(state);
}

std::pair<std::complex<double>, std::complex<double>> linear_spectrum(double xi, double lambda) {
  using C = std::complex<double>;
  const double disc = lambda * lambda - 4.0 * xi * xi;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double fast = 0.5 * (lambda + root);
    // product of the roots is xi^2; avoids cancellation in the slow root
    const double slow = fast > 0.0 ? xi * xi / fast : 0.0;
    return {C(slow), C(fast)};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {C(0.5 * lambda, -im), C(0.5 * lambda, im)};
}

// ---------------------------------------------------------------------------

PressureLaw PressureLaw::gamma_law(double gamma) {
  if (!(gamma > 0.0)) throw RangeError("adiabatic exponent must be positive");
  PressureLaw law;
  law.kind_ = Kind::gamma_law;
  law.gamma_ = gamma;
  return law;
}

PressureLaw PressureLaw::general(std::function<double(double)> dP) {
  if (!dP) throw ContractError("pressure law needs P'");
  if (std::abs(dP(1.0) - 1.0) > 1e-12) throw ContractError("pressure law must satisfy P'(1) = 1");
  PressureLaw law;
  law.kind_ = Kind::general;
  law.dP_ = std::move(dP);
  return law;
}

double PressureLaw::dP(double rho) const {
  if (kind_ == Kind::gamma_law) return std::pow(rho, gamma_ - 1.0);
  return dP_(rho);
}

double n_from_rho(double rho, const PressureLaw& law) {
  if (!(rho > 0.0)) throw DomainError("density must be positive");
  if (law.kind() == PressureLaw::Kind::gamma_law) {
    const double g1 = law.gamma() - 1.0;
    if (g1 == 0.0) return std::log(rho);
    return (std::pow(rho, g1) - 1.0) / g1;
  }
  auto integrand = [&](double s) {
    const double d = law.dP(s);
    if (!(d > 0.0)) throw DomainError("P' is not positive on [1, rho]");
    return d / s;
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 1.0, rho, 15, 1e-14);
}

double rho_from_n(double n, const PressureLaw& law) {
  if (law.kind() == PressureLaw::Kind::gamma_law) {
    const double g1 = law.gamma() - 1.0;
    if (g1 == 0.0) return std::exp(n);
    const double base = 1.0 + g1 * n;
    if (!(base > 0.0)) throw DomainError("n = " + std::to_string(n) + " is outside the range of n(rho)");
    return std::pow(base, 1.0 / g1);
  }
  if (n == 0.0) return 1.0;
  auto f = [&](double rho) { return n_from_rho(rho, law) - n; };
  double lo = 1.0, hi = 1.0;
  try {
    for (int i = 0; i < 64; ++i) {
      if (n > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (f(hi) >= 0.0) break;
      } else {
        hi = lo;
        lo *= 0.5;
        if (f(lo) <= 0.0) break;
      }
      if (i == 63) throw DomainError("no bracket");
    }
  } catch (const DomainError&) {
    throw DomainError("n = " + std::to_string(n) + " is outside the range of n(rho)");
  }
  boost::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

double G_of_n(double n, const PressureLaw& law) {
  if (law.kind() == PressureLaw::Kind::gamma_law) {
    const double g1 = law.gamma() - 1.0;
    if (!(1.0 + g1 * n > 0.0)) throw DomainError("n = " + std::to_string(n) + " is outside the range of n(rho)");
    return g1 * n;
  }
  return law.dP(rho_from_n(n, law)) - 1.0;
}

namespace {

RealArray pointwise_G(const RealArray& n, const PressureLaw& law, double time) {
  RealArray g(n.size());
  try {
    for (Index i = 0; i < n.size(); ++i) g(i) = G_of_n(n(i), law);
  } catch (const DomainError& e) {
    throw DomainError(e.what(), time);
  }
  return g;
}

}  // namespace

StateDerivative EulerModel::nonstiff(const SystemState& s) const {
  const GridSpec& g = s.grid();
  const RealArray n = band_samples(s.first);
  const RealArray V = band_samples(s.second);
  const RealArray G = pointwise_G(n, cfg_.pressure, s.time);
  const Field dn = derivative(s.first);
  const Field dV = derivative(s.second);
  const RealArray dV_s = band_samples(dV);
  return {-band_product(g, V, band_samples(dn)) - dV - band_product(g, G, dV_s),
          -band_product(g, V, dV_s) - dn};
}

double EulerModel::max_speed(const SystemState& s) const {
  const RealArray G = pointwise_G(band_samples(s.first), cfg_.pressure, s.time);
  return band_samples(s.second).abs().maxCoeff() + std::sqrt(1.0 + std::max(0.0, G.maxCoeff()));
}

RhsSplit euler_rhs(const SystemState& state, const EulerConfig& cfg) {
  return EulerModel(cfg).rhs(state);
}

// ---------------------------------------------------------------------------

void GeneralConfig::validate() const {
  if (!(alpha > 0.0)) throw RangeError("alpha must be positive");
  if (!(beta > 0.0)) throw RangeError("beta must be positive");
  if (!(lambda > 0.0)) throw RangeError("lambda must be positive");
  if (q < 2) throw RangeError("drag exponent q must be >= 2");
  if (q > 4) throw RangeError("drag exponent q must be <= 4 (dealiasing budget)");
  if (!V1 || !V2 || !W1 || !W2) throw ContractError("coefficient functions must be set");
}

GeneralModel::GeneralModel(GeneralConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

StateDerivative GeneralModel::nonstiff(const SystemState& s) const {
  const GridSpec& g = s.grid();
  const RealArray u = band_samples(s.first);
  const RealArray v = band_samples(s.second);
  RealArray v1(u.size()), v2(u.size()), w1(u.size()), w2(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    v1(i) = cfg_.V1(v(i));
    v2(i) = cfg_.V2(v(i));
    w1(i) = cfg_.W1(u(i), v(i));
    w2(i) = cfg_.W2(u(i), v(i));
  }
  const Field du = derivative(s.first);
  const Field dv = derivative(s.second);
  const RealArray du_s = band_samples(du);
  const RealArray dv_s = band_samples(dv);

  Field first = -(cfg_.alpha * dv + band_product(g, v1, du_s) + band_product(g, w1, dv_s));
  Field second = -(cfg_.beta * du + band_product(g, v2, du_s) + band_product(g, w2, dv_s));
  if (cfg_.kappa != 0.0) {
    Field vq = s.second;
    for (int i = 1; i < cfg_.q; ++i) vq = dealias_product(vq, s.second);
    second -= (cfg_.kappa * cfg_.lambda) * vq;
  }
  return {std::move(first), std::move(second)};
}

double GeneralModel::max_speed(const SystemState& s) const {
  const RealArray u = band_samples(s.first);
  const RealArray v = band_samples(s.second);
  double speed = 0.0;
  for (Index i = 0; i < u.size(); ++i) {
    // eigenvalues of [[V1, alpha + W1], [beta + V2, W2]]
    const double a = cfg_.V1(v(i)), b = cfg_.alpha + cfg_.W1(u(i), v(i));
    const double c = cfg_.beta + cfg_.V2(v(i)), d = cfg_.W2(u(i), v(i));
    const double half = 0.5 * (a - d);
    speed = std::max(speed, std::abs(0.5 * (a + d)) + std::sqrt(std::abs(half * half + b * c)));
  }
  return speed;
}

RhsSplit general_rhs(const SystemState& state, const GeneralConfig& cfg) {
  return GeneralModel(cfg).rhs(state);
}

SystemState GeneralScaling::to_normalized(const SystemState& s) const {
  const GridSpec g = to_normalized(s.grid());
  return SystemState(Field::from_coefficients(g, s.first.coefficients() / u_scale),
                     Field::from_coefficients(g, s.second.coefficients() / v_scale), s.time * time_scale);
}

SystemState GeneralScaling::from_normalized(const SystemState& s) const {
  const GridSpec g = from_normalized(s.grid());
  return SystemState(Field::from_coefficients(g, s.first.coefficients() * u_scale),
                     Field::from_coefficients(g, s.second.coefficients() * v_scale), s.time / time_scale);
}

StateDerivative GeneralScaling::rate_from_normalized(const StateDerivative& d, const GridSpec& original) const {
  return {Field::from_coefficients(original, d.first.coefficients() * (time_scale * u_scale)),
          Field::from_coefficients(original, d.second.coefficients() * (time_scale * v_scale))};
}

Trajectory GeneralScaling::from_normalized(const Trajectory& traj) const {
  Trajectory out(from_normalized(traj.grid()));
  for (const auto& s : traj.states()) out.append(from_normalized(s));
  return out;
}

NormalizedGeneral normalize_general(const GeneralConfig& cfg) {
  cfg.validate();
  const double sa = std::sqrt(cfg.alpha), sb = std::sqrt(cfg.beta);
  const double sab = sa * sb;
  NormalizedGeneral out;
  out.scaling = {sa, sb, cfg.lambda, cfg.lambda / sab};
  GeneralConfig& n = out.config;
  n.alpha = n.beta = n.lambda = 1.0;
  n.q = cfg.q;
  n.kappa = cfg.kappa * std::pow(cfg.beta, 0.5 * (cfg.q - 1));
  const double alpha = cfg.alpha, beta = cfg.beta;
  n.V1 = [f = cfg.V1, sb, sab](double v) { return f(sb * v) / sab; };
  n.W1 = [f = cfg.W1, sa, sb, alpha](double u, double v) { return f(sa * u, sb * v) / alpha; };
  n.V2 = [f = cfg.V2, sb, beta](double v) { return f(sb * v) / beta; };
  n.W2 = [f = cfg.W2, sa, sb, sab](double u, double v) { return f(sa * u, sb * v) / sab; };
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Field remap_modes(const Field& f, const GridSpec& target, Index q) {
  ComplexArray c = ComplexArray::Zero(target.spectrum_size());
  const auto& src = f.coefficients();
  for (Index m = 0; m < src.size(); ++m) {
    if (src(m) == std::complex<double>(0.0)) continue;
    if (q * m > target.nyquist())
      throw GridError("rescaled mode " + std::to_string(q * m) + " exceeds the target Nyquist index " +
                      std::to_string(target.nyquist()));
    c(q * m) = src(m);
  }
  return Field::from_coefficients(target, std::move(c));
}

}  // namespace

SystemState rescale_state(const SystemState& s, double lambda, const GridSpec& target) {
  if (!(lambda > 0.0)) throw RangeError("lambda must be positive");
  const double ratio = target.length() * lambda / s.grid().length();
  const Index q = static_cast<Index>(std::llround(ratio));
  if (q < 1 || std::abs(ratio - double(q)) > 1e-9 * ratio)
    throw GridError("target length must be an integer multiple of L / lambda");
  return SystemState(remap_modes(s.first, target, q), remap_modes(s.second, target, q), s.time / lambda);
}

Trajectory rescale_solution(const Trajectory& traj, double lambda, const GridSpec& target) {
  Trajectory out(target);
  for (const auto& s : traj.states()) out.append(rescale_state(s, lambda, target));
  return out;
}

Trajectory rescale_solution(const Trajectory& traj, double lambda) {
  return rescale_solution(traj, lambda, traj.grid().scaled(1.0 / lambda));
}

// ---------------------------------------------------------------------------

double Envelope::modulus(double xi, double length) const {
  const double xs = std::ldexp(1.0, J_split);
  const double base = std::sqrt(2.0 * M_PI) / length;
  const double r = xi / xs;
  if (xi <= xs) return base * std::pow(xi, -(s_low + 0.5)) * std::pow(r, tilt);
  return base * std::pow(xs, -(s_low + 0.5)) * std::pow(r, -(s_high + 0.5) - tilt);
}

SystemState make_initial_data(const Envelope& env, double amplitude, std::uint64_t seed, const GridSpec& grid) {
  if (!(amplitude >= 0.0)) throw RangeError("amplitude must be nonnegative");
  std::mt19937_64 rng(seed);
  auto component = [&]() {
    ComplexArray c = ComplexArray::Zero(grid.spectrum_size());
    for (Index m = 1; m <= grid.dealias_cutoff(); ++m) {
      const double theta = 2.0 * M_PI * std::ldexp(double(rng() >> 11), -53);
      const double xi = grid.wavenumber(m);
      if (xi < env.band_min || xi > env.band_max) continue;
      c(m) = std::polar(amplitude * env.modulus(xi, grid.length()), theta);
    }
    return Field::from_coefficients(grid, std::move(c));
  };
  Field u = component();
  Field v = component();
  return SystemState(std::move(u), std::move(v), 0.0);
}

}  // namespace pdh
