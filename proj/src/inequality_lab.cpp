#include "pdh/inequality_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pdh/spectral.hpp"

namespace pdh {

RatioReport RatioReport::make(double lhs, double rhs, std::string inputs) {
  RatioReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.inputs = std::move(inputs);
  if (rhs > 0.0) {
    r.ratio = lhs / rhs;
  } else {
    r.ratio = lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return r;
}

double fitted_constant(const std::vector<RatioReport>& reports) {
  double c = 0.0;
  for (const auto& r : reports) c = std::max(c, r.ratio);
  return c;
}

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string fmt(const char* name, double value) {
  std::ostringstream os;
  os << name << "=" << value;
  return os.str();
}

/// Pointwise product; exact for quarter-band inputs.
Field times(const Field& a, const Field& b) {
  a.check_same_grid(b);
  return Field::from_samples(a.grid(), (a.samples() * b.samples()).eval());
}

/// S_j f = sum of blocks k <= j - 1.
Field low_part(const DyadicDecomposition& d, const Field& f, int j) {
  return d.lowpass(f, std::clamp(j - 1, d.j_min() - 1, d.j_max()));
}

double conjugate(double p) { return p == 1.0 ? kInf : (std::isinf(p) ? 1.0 : p / (p - 1.0)); }

double min_inverse(double p) { return std::min(1.0 / p, 1.0 / conjugate(p)); }

}  // namespace

std::string to_string(InputFamily family) {
  switch (family) {
    case InputFamily::random_band: return "random_band";
    case InputFamily::packet: return "packet";
    case InputFamily::multiscale: return "multiscale";
  }
  return "unknown";
}

Field random_band_field(const GridSpec& grid, double xi_min, double xi_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ComplexArray c = ComplexArray::Zero(grid.spectrum_size());
  for (Index m = 1; m < grid.nyquist(); ++m) {
    const double xi = grid.wavenumber(m);
    if (xi < xi_min || xi > xi_max) continue;
    const double amp = 0.5 + 0.5 * unit_uniform(rng);
    const double theta = 2.0 * M_PI * unit_uniform(rng);
    c(m) = std::polar(amp, theta);
  }
  return Field::from_coefficients(grid, std::move(c));
}

Field packet_field(const GridSpec& grid, const CutoffProfile& profile, int j, double x0) {
  ComplexArray c = ComplexArray::Zero(grid.spectrum_size());
  double peak = 0.0;
  for (Index m = 1; m < grid.nyquist(); ++m) {
    const double xi = grid.wavenumber(m);
    const double a = profile.phi(std::ldexp(xi, -j));
    c(m) = std::polar(a, -xi * x0);
    peak += 2.0 * a;
  }
  if (peak == 0.0) throw GridError("block " + std::to_string(j) + " holds no grid mode");
  c /= std::complex<double>(peak);
  return Field::from_coefficients(grid, std::move(c));
}

Field multiscale_field(const GridSpec& grid, double s, int j_lo, int j_hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ComplexArray c = ComplexArray::Zero(grid.spectrum_size());
  for (int j = j_lo; j <= j_hi; ++j) {
    const double xi = 1.4 * std::ldexp(1.0, j);
    const double m_real = xi / grid.fundamental();
    const Index m = static_cast<Index>(std::llround(m_real));
    if (std::abs(m_real - m) > 1e-9 * m_real || m < 1 || m >= grid.nyquist())
      throw GridError("1.4 * 2^" + std::to_string(j) + " is not a resolved grid wavenumber");
    c(m) += std::polar(0.5 * std::pow(2.0, -j * s), 2.0 * M_PI * unit_uniform(rng));
  }
  return Field::from_coefficients(grid, std::move(c));
}

Field family_member(InputFamily family, const GridSpec& grid, int j, std::uint64_t seed) {
  switch (family) {
    case InputFamily::random_band:
      return random_band_field(grid, std::ldexp(1.0, j), std::ldexp(1.0, j + 1), seed);
    case InputFamily::packet: {
      std::mt19937_64 rng(seed);
      return packet_field(grid, CutoffProfile(), j, grid.length() * unit_uniform(rng));
    }
    case InputFamily::multiscale:
      return multiscale_field(grid, 0.5, j - 2, j + 1, seed);
  }
  throw RangeError("unknown input family");
}

Field dilate(const Field& f, int k) {
  return Field::from_coefficients(f.grid().scaled(std::ldexp(1.0, -k)), f.coefficients());
}

void require_quarter_band(const Field& f, const std::string& name) {
  const auto& c = f.coefficients();
  const double scale = c.abs().maxCoeff();
  const Index quarter = f.grid().points() / 4;
  for (Index m = quarter; m < c.size(); ++m)
    if (std::abs(c(m)) > 1e-14 * scale)
      throw ContractError(name + " has modes beyond N/4; products would not be resolved");
}

// ---------------------------------------------------------------------------

RatioReport check_bernstein(const Field& f, double p, double lambda, double R1, double R2) {
  if (!(p >= 2.0) || std::isinf(p)) throw RangeError("Bernstein check needs 2 <= p < inf");
  if (!(lambda > 0.0) || !(R1 > 0.0 && R1 < R2)) throw RangeError("annulus needs lambda > 0 and 0 < R1 < R2");
  const auto& c = f.coefficients();
  const double scale = c.abs().maxCoeff();
  if (scale == 0.0) throw EmptyFieldError("Bernstein check of a zero field");
  for (Index m = 0; m < c.size(); ++m) {
    if (std::abs(c(m)) <= 1e-13 * scale) continue;
    const double xi = f.grid().wavenumber(m);
    if (xi < R1 * lambda * (1 - 1e-12) || xi > R2 * lambda * (1 + 1e-12))
      throw ContractError("field has mode xi = " + std::to_string(xi) + " outside the annulus");
  }
  const RealArray u = f.samples();
  const RealArray du = derivative(f).samples();
  const RealArray a = u.abs();
  const double dx = f.grid().dx();
  const double lhs = lambda * lambda * (p - 1) / p * a.pow(p).sum() * dx;
  const double rhs = (p - 1) * (p == 2.0 ? du.square().sum() : (du.square() * a.pow(p - 2)).sum()) * dx;
  return RatioReport::make(lhs, rhs, fmt("p", p) + " " + fmt("lambda", lambda));
}

// ---------------------------------------------------------------------------

CommutatorReport check_commutator(const Field& w, const Field& v, double s, double p, CommutatorVariant variant,
                                  const DyadicDecomposition& d) {
  if (!(p >= 1.0)) throw RangeError("Lebesgue exponent must be >= 1");
  const double m = min_inverse(p);
  switch (variant) {
    case CommutatorVariant::com1:
      if (!(s > -m)) throw RangeError("com1 needs s > -min(1/p,1/p') = " + std::to_string(-m));
      if (!(s <= 1.0 / p + 1.0)) throw RangeError("com1 needs s <= 1/p + 1 = " + std::to_string(1.0 / p + 1.0));
      break;
    case CommutatorVariant::com3:
      if (!(s >= -m)) throw RangeError("com3 needs s >= -min(1/p,1/p') = " + std::to_string(-m));
      if (!(s < 1.0 / p + 1.0)) throw RangeError("com3 needs s < 1/p + 1 = " + std::to_string(1.0 / p + 1.0));
      break;
    case CommutatorVariant::com2:
      if (!(s > -1.0 - m)) throw RangeError("com2 needs s > -1 - min(1/p,1/p') = " + std::to_string(-1.0 - m));
      if (!(s <= 1.0 / p)) throw RangeError("com2 needs s <= 1/p = " + std::to_string(1.0 / p));
      break;
  }
  require_quarter_band(w, "w");
  require_quarter_band(v, "v");

  const Field dw = derivative(w);
  const double r = variant == CommutatorVariant::com3 ? kInf : 1.0;
  const double rhs = d.besov_norm(dw, {1.0 / p, p, 1.0}) * d.besov_norm(v, {s, p, r});

  CommutatorReport out;
  std::vector<double> lhs;
  const Field dv = derivative(v);
  const Field w_dv = times(w, dv);
  const Field w_v = times(w, v);
  for (int j = d.j_min(); j <= d.j_max(); ++j) {
    Field c = variant == CommutatorVariant::com2 ? derivative(times(w, d.block(v, j)) - d.block(w_v, j))
                                                 : times(w, d.block(dv, j)) - d.block(w_dv, j);
    out.j.push_back(j);
    lhs.push_back(std::pow(2.0, j * s) * lp_norm(c, p));
  }
  double total = 0.0, sup = 0.0;
  for (double x : lhs) {
    total += x;
    sup = std::max(sup, x);
  }
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double cj = total > 0.0 ? lhs[i] / total : 0.0;
    out.c.push_back(cj);
    const std::string tag = "j=" + std::to_string(out.j[i]);
    if (variant == CommutatorVariant::com3) {
      out.per_j.push_back(RatioReport::make(lhs[i], rhs, tag));
    } else if (cj > 0.0) {
      out.per_j.push_back(RatioReport::make(lhs[i], cj * rhs, tag));
    } else {
      out.per_j.push_back(RatioReport::make(0.0, 0.0, tag));
    }
  }
  const std::string desc = fmt("s", s) + " " + fmt("p", p);
  out.aggregate = RatioReport::make(variant == CommutatorVariant::com3 ? sup : total, rhs, desc);
  return out;
}

std::vector<RatioReport> check_block_commutator(const Field& a, const Field& b, double p, double q,
                                                const DyadicDecomposition& d, int j_lo, int j_hi) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw RangeError("Lebesgue exponents must be >= 1");
  require_quarter_band(a, "a");
  require_quarter_band(b, "b");
  const double r = 1.0 / (1.0 / p + 1.0 / q);
  if (r < 1.0) throw RangeError("1/p + 1/q must not exceed 1");
  const double rhs0 = lp_norm(derivative(a), q) * lp_norm(b, p);
  const Field ab = times(a, b);
  std::vector<RatioReport> out;
  for (int j = j_lo; j <= j_hi; ++j) {
    const Field c = d.block(ab, j) - times(a, d.block(b, j));
    out.push_back(RatioReport::make(lp_norm(c, r), std::ldexp(rhs0, -j), "j=" + std::to_string(j)));
  }
  return out;
}

// ---------------------------------------------------------------------------

RatioReport check_product_law(const Field& a, const Field& b, ProductVariant variant, const ProductParams& prm,
                              const DyadicDecomposition& d) {
  const double s = prm.s, p = prm.p, r = prm.r;
  const int J = prm.J;
  if (!(p >= 1.0) || !(r >= 1.0)) throw RangeError("Besov exponents p and r must be >= 1");
  const double m = min_inverse(p);
  require_quarter_band(a, "a");
  require_quarter_band(b, "b");
  const Field ab = times(a, b);
  const auto inf_norm = [](const Field& f) { return lp_norm(f, kInf); };
  std::string desc;
  double lhs = 0.0, rhs = 0.0;

  switch (variant) {
    case ProductVariant::prod1: {
      if (!(s > 0.0)) throw RangeError("prod1 needs s > 0");
      const NormSpec sp{s, p, r};
      lhs = d.besov_norm(ab, sp);
      rhs = inf_norm(a) * d.besov_norm(b, sp) + d.besov_norm(a, sp) * inf_norm(b);
      desc = "prod1 " + fmt("s", s) + " " + fmt("p", p) + " " + fmt("r", r);
      break;
    }
    case ProductVariant::prod2: {
      if (!(s > -m)) throw RangeError("prod2 needs s > -min(1/p,1/p') = " + std::to_string(-m));
      if (!(s <= 1.0 / p)) throw RangeError("prod2 needs s <= 1/p = " + std::to_string(1.0 / p));
      lhs = d.besov_norm(ab, {s, p, 1.0});
      rhs = d.besov_norm(a, {1.0 / p, p, 1.0}) * d.besov_norm(b, {s, p, 1.0});
      desc = "prod2 " + fmt("s", s) + " " + fmt("p", p);
      break;
    }
    case ProductVariant::prod3: {
      if (!(s > -m)) throw RangeError("prod3 needs s > -min(1/p,1/p') = " + std::to_string(-m));
      if (!(s <= 1.0 / p + 1.0)) throw RangeError("prod3 needs s <= 1/p + 1 = " + std::to_string(1.0 / p + 1.0));
      lhs = d.besov_norm(ab, {s, p, 1.0}, Side::low, J);
      rhs = (std::ldexp(inf_norm(a), J) + d.besov_norm(a, {1.0 / p + 1.0, p, 1.0})) *
            d.besov_norm(b, {s - 1.0, p, 1.0});
      desc = "prod3 " + fmt("s", s) + " " + fmt("p", p) + " " + fmt("J", J);
      break;
    }
    case ProductVariant::prod4: {
      if (!(p >= 2.0 && p <= 4.0)) throw RangeError("prod4 needs 2 <= p <= 4");
      lhs = d.besov_norm(ab, {0.5, 2.0, 1.0});
      const double a_low = d.besov_norm(a, {1.0 / p - 1.0, p, 1.0}, Side::low, J);
      const double a_high = d.besov_norm(a, {0.5, 2.0, 1.0}, Side::high, J);
      const double b_low = d.besov_norm(b, {2.0 / p - 0.5, p, 1.0}, Side::low, J);
      const double b_high = d.besov_norm(b, {0.5, 2.0, 1.0}, Side::high, J);
      rhs = (std::ldexp(a_low, J) + a_high) * (std::pow(2.0, J * (0.5 - 1.0 / p)) * b_low + b_high);
      desc = "prod4 " + fmt("p", p) + " " + fmt("J", J);
      break;
    }
  }
  return RatioReport::make(lhs, rhs, desc);
}

// ---------------------------------------------------------------------------

CompositionReport check_composition(const std::function<double(double)>& f, const Field& u, const NormSpec& spec,
                                    const DyadicDecomposition& d) {
  if (std::abs(f(0.0)) > 1e-12) throw ContractError("composition needs f(0) = 0, got " + std::to_string(f(0.0)));
  const double inv_p = 1.0 / spec.p;
  if (!(spec.s > 0.0)) throw RangeError("composition needs s > 0");
  if (spec.s > inv_p * (1 + 1e-15) || (std::abs(spec.s - inv_p) <= 1e-15 * inv_p && spec.r != 1.0))
    throw RangeError("composition needs s < 1/p, or s = 1/p with r = 1");

  const RealArray x = u.samples();
  RealArray fx(x.size());
  for (Index i = 0; i < x.size(); ++i) fx(i) = f(x(i));
  const Field fu = Field::from_samples(u.grid(), fx);

  CompositionReport out;
  out.ratio = RatioReport::make(d.besov_norm(fu, spec), d.besov_norm(u, spec),
                                fmt("s", spec.s) + " " + fmt("p", spec.p) + " " + fmt("r", spec.r));
  const double lo = x.minCoeff(), hi = x.maxCoeff();
  const double h = 1e-6 * std::max(1.0, hi - lo);
  const int n = 200;
  for (int i = 0; i <= n; ++i) {
    const double y = lo + (hi - lo) * i / n;
    out.derivative_bound = std::max(out.derivative_bound, std::abs(f(y + h) - f(y - h)) / (2 * h));
  }
  return out;
}

// ---------------------------------------------------------------------------

RemainderReport check_remainder(const Field& w, const Field& z, double s, double p, int J0,
                                const DyadicDecomposition& d) {
  if (!(p >= 2.0 && p <= 4.0)) throw RangeError("remainder bound needs 2 <= p <= 4");
  if (!(s >= 0.5 && s <= 1.5)) throw RangeError("remainder bound needs 1/2 <= s <= 3/2");
  require_quarter_band(w, "w");
  require_quarter_band(z, "z");
  if (std::abs(w.mean()) > 1e-14 * (1.0 + w.coefficients().abs().maxCoeff()))
    throw ContractError("w must have zero mean");

  const Field dz = derivative(z);
  const Field dw = derivative(w);
  const Field w_dz = times(w, dz);

  // T'_{z_x} w = sum_k S_{k+2}(z_x) Delta_k w
  Field paraproduct = Field::zero(w.grid());
  for (int k = d.j_min(); k <= d.j_max(); ++k) paraproduct += times(low_part(d, dz, k + 2), d.block(w, k));

  std::vector<double> n_total, n1, n2, n3;
  double residual = 0.0, scale = 0.0;
  for (int j = d.j_min(); j <= d.j_max(); ++j) {
    const Field R = times(low_part(d, w, j - 1), d.block(dz, j)) - d.block(w_dz, j);
    const Field R1 = -d.block(paraproduct, j);
    Field R2 = Field::zero(w.grid());
    for (int jp = std::max(j - 4, d.j_min()); jp <= std::min(j + 4, d.j_max()); ++jp) {
      const Field S = low_part(d, w, jp - 1);
      const Field g = d.block(dz, jp);
      R2 -= d.block(times(S, g), j) - times(S, d.block(g, j));
    }
    Field R3 = Field::zero(w.grid());
    const Field Sj = low_part(d, w, j - 1);
    for (int jp = std::max(j - 1, d.j_min()); jp <= std::min(j + 1, d.j_max()); ++jp)
      R3 -= times(low_part(d, w, jp - 1) - Sj, d.block(d.block(dz, jp), j));

    const double weight = std::pow(2.0, j * s);
    n_total.push_back(weight * lp_norm(R, 2.0));
    n1.push_back(weight * lp_norm(R1, 2.0));
    n2.push_back(weight * lp_norm(R2, 2.0));
    n3.push_back(weight * lp_norm(R3, 2.0));
    residual = std::max(residual, lp_norm(R - R1 - R2 - R3, 2.0));
    scale = std::max(scale, lp_norm(R, 2.0));
  }

  const auto sum_from = [&](const std::vector<double>& v, int from) {
    double acc = 0.0;
    for (int j = std::max(from, d.j_min()); j <= d.j_max(); ++j) acc += v[j - d.j_min()];
    return acc;
  };

  const double p_star = p == 2.0 ? kInf : 2.0 * p / (p - 2.0);
  const double inv_ps = 1.0 / p_star;
  const bool endpoint = s == 1.5;
  const double dw_inf = lp_norm(dw, kInf);
  const double T1 = dw_inf * d.besov_norm(dz, {s - 1.0, 2.0, 1.0}, Side::high, J0);
  const double T2 = std::pow(2.0, J0 * (s - 0.5)) * d.besov_norm(dz, {1.0 / p - 1.0, p, 1.0}) *
                    d.besov_norm(w, {1.0 + inv_ps, p_star, 1.0}, Side::low, J0);
  const double dz_mid = endpoint ? lp_norm(dz, kInf) : d.besov_norm(dz, {s - 1.5, kInf, kInf});
  const double T3 = dz_mid * d.besov_norm(w, {1.5, 2.0, 1.0}, Side::high, J0);
  const double T4 = d.besov_norm(dz, {s - 0.5 - 1.0 / p, p, 1.0}, Side::low, J0) *
                    d.besov_norm(dw, {-inv_ps, p_star, 1.0}, Side::low, J0);

  const std::string desc = fmt("s", s) + " " + fmt("p", p) + " " + fmt("J0", J0);
  RemainderReport out;
  out.total = RatioReport::make(sum_from(n_total, J0), T1 + T2 + T3 + T4, desc);
  out.piece1 = RatioReport::make(sum_from(n1, d.j_min()), T2 + T3, desc + " R1");
  out.piece2 = RatioReport::make(sum_from(n2, J0), T1 + T4, desc + " R2");
  out.piece3 = RatioReport::make(sum_from(n3, J0), T1, desc + " R3");
  out.identity_residual = scale > 0.0 ? residual / scale : residual;
  return out;
}

// ---------------------------------------------------------------------------

OdeLemmaTrace ode_lemma_demo(const std::function<double(double)>& A, double B, double X0, double p, double horizon,
                             int steps) {
  if (!(p >= 1.0)) throw RangeError("ODE lemma needs p >= 1");
  if (!(B >= 0.0) || !(X0 >= 0.0)) throw RangeError("ODE lemma needs B >= 0 and X0 >= 0");
  if (!(horizon > 0.0) || steps < 1) throw RangeError("ODE lemma needs a positive horizon and steps");

  // state (Y = X^p, int X, int A)
  using State = std::array<double, 3>;
  const auto rate = [&](double t, const State& y) {
    const double Y = std::max(y[0], 0.0);
    const double X = std::pow(Y, 1.0 / p);
    const double Xpm1 = p == 1.0 ? 1.0 : std::pow(Y, (p - 1.0) / p);
    return State{p * (A(t) * Xpm1 - B * Y), X, A(t)};
  };
  const auto axpy = [](const State& y, double h, const State& k) {
    return State{y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]};
  };

  OdeLemmaTrace out;
  State y{std::pow(X0, p), 0.0, 0.0};
  const double h = horizon / steps;
  out.min_slack = std::numeric_limits<double>::infinity();
  double scale = 1.0;
  for (int n = 0; n <= steps; ++n) {
    const double t = n * h;
    const double X = std::pow(std::max(y[0], 0.0), 1.0 / p);
    const double lhs = X + B * y[1];
    const double rhs = X0 + y[2];
    out.t.push_back(t);
    out.X.push_back(X);
    out.lhs.push_back(lhs);
    out.rhs.push_back(rhs);
    out.slack.push_back(rhs - lhs);
    out.min_slack = std::min(out.min_slack, rhs - lhs);
    scale = std::max(scale, std::abs(rhs));
    if (n == steps) break;
    const State k1 = rate(t, y);
    const State k2 = rate(t + h / 2, axpy(y, h / 2, k1));
    const State k3 = rate(t + h / 2, axpy(y, h / 2, k2));
    const State k4 = rate(t + h, axpy(y, h, k3));
    for (int i = 0; i < 3; ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  out.holds = out.min_slack >= -1e-10 * scale;
  return out;
}

// ---------------------------------------------------------------------------

DilationStudy study_dilation(const std::function<std::vector<RatioReport>(int)>& evaluate, int levels) {
  if (levels < 1) throw RangeError("dilation study needs at least one level");
  DilationStudy out;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int k = 0; k < levels; ++k) {
    const double c = fitted_constant(evaluate(k));
    out.constants.push_back(c);
    if (c > 0.0) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  out.spread = hi > 0.0 ? hi / lo - 1.0 : 0.0;
  return out;
}

}  // namespace pdh
