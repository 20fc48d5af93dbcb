#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "pdh/functionals.hpp"
#include "pdh/spectral.hpp"

using namespace pdh;

namespace {

GridSpec plateau_grid(int log2_points, int a) {
  return GridSpec(Index(1) << log2_points, 10 * M_PI * std::ldexp(1.0, a));
}

DyadicDecomposition decomposition(const GridSpec& g) {
  return DyadicDecomposition::build(CutoffProfile(), g);
}

SystemState random_state(const GridSpec& g, std::uint64_t seed, double amplitude = 0.05) {
  Envelope env;
  env.s_low = 0.0;
  env.s_high = 2.0;
  env.J_split = 0;
  env.tilt = 0.5;
  return make_initial_data(env, amplitude, seed, g);
}

Trajectory scaled_copies(const SystemState& s0, const std::vector<double>& times,
                         const std::function<std::pair<double, double>(double)>& factors) {
  Trajectory traj(s0.grid());
  for (double t : times) {
    const auto [a, b] = factors(t);
    traj.append(SystemState{a * s0.first, b * s0.second, t});
  }
  return traj;
}

std::vector<double> uniform_times(double T, int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = T * i / n;
  return t;
}

double sample_l2_squared(const Field& f) {
  const RealArray s = f.samples();
  return (s * s).sum() * f.grid().dx();
}

}  // namespace

TEST_CASE("damped mode") {
  const GridSpec g = GridSpec::dyadic(6, 0);
  const double k = 3.0;
  const Field u = Field::from_function(g, [&](double x) { return std::sin(k * x); });
  const Field v = Field::from_function(g, [](double x) { return std::cos(2 * x) + 0.5; });

  const Field z = damped_mode(SystemState{u, Field::zero(g), 0.0}, 2.0);
  const RealArray x = g.nodes();
  CHECK((z.samples() - k * (k * x).cos()).abs().maxCoeff() < 1e-12);

  const Field z2 = damped_mode(SystemState{Field::zero(g), v, 0.0}, 3.0);
  CHECK((z2.samples() - 3.0 * v.samples()).abs().maxCoeff() < 1e-13);

  const Field c = Field::from_function(g, [](double) { return 0.7; });
  CHECK(damped_mode(SystemState{c, Field::zero(g), 0.0}, 1.0).samples().abs().maxCoeff() < 1e-15);
}

TEST_CASE("besov series") {
  const GridSpec g = GridSpec::dyadic(7, 2);
  const auto d = decomposition(g);
  const NormSpec spec{0.5, 2.0, 1.0};

  SUBCASE("zero trajectory") {
    Trajectory traj(g);
    for (double t : {0.0, 0.5, 1.0}) traj.append(SystemState::zero(g, t));
    for (double v : besov_series(traj, d, spec).values) CHECK(v == 0.0);
  }

  SUBCASE("frozen state gives a constant series") {
    const SystemState s = random_state(g, 3);
    const auto traj = scaled_copies(s, uniform_times(1.0, 10), [](double) { return std::pair{1.0, 1.0}; });
    const auto series = besov_series(traj, d, spec, Side::low, 0);
    for (double v : series.values) CHECK(v == series.values.front());
    CHECK(series.values.front() > 0.0);
  }

  SUBCASE("pure damping is exponential") {
    const double lambda = 1.7;
    SystemState s = random_state(g, 5);
    s.first = Field::zero(g);
    const auto traj = scaled_copies(s, uniform_times(2.0, 20),
                                    [&](double t) { return std::pair{0.0, std::exp(-lambda * t)}; });
    const double v0 = d.besov_norm(s.second, spec);
    const auto series = besov_series(traj, d, spec, Side::full, 0, Component::second);
    for (std::size_t i = 0; i < series.times.size(); ++i)
      CHECK(std::abs(series.values[i] - std::exp(-lambda * series.times[i]) * v0) < 1e-10 * v0);
    const auto u_only = besov_series(traj, d, spec, Side::full, 0, Component::first);
    for (double v : u_only.values) CHECK(v == 0.0);
  }
}

TEST_CASE("X_p_lambda on explicit trajectories") {
  const GridSpec g = GridSpec::dyadic(7, 2);
  const auto d = decomposition(g);

  SUBCASE("zero trajectory") {
    Trajectory traj(g);
    for (double t : {0.0, 1.0, 2.0}) traj.append(SystemState::zero(g, t));
    CHECK(X_p_lambda(traj, d, 2.0, 1.0, 0) == 0.0);
    CHECK(X_p_lambda(traj, d, 3.0, 4.0, -1) == 0.0);
  }

  SUBCASE("exponent range") {
    Trajectory traj(g);
    traj.append(SystemState::zero(g));
    CHECK_THROWS_AS(X_p_lambda(traj, d, 1.5, 1.0, 0), RangeError);
    CHECK_THROWS_AS(X_p_lambda(traj, d, 4.5, 1.0, 0), RangeError);
    CHECK_THROWS_AS(X_p(traj, d, 5.0, 0), RangeError);
    CHECK_THROWS_AS(X_p_lambda(Trajectory(g), d, 2.0, 1.0, 0), RangeError);
  }

  SUBCASE("single snapshot reduces to the data norm") {
    const SystemState s = random_state(g, 11);
    Trajectory traj(g);
    traj.append(s);
    for (double p : {2.0, 3.0, 4.0}) {
      for (double lambda : {1.0, 4.0}) {
        const auto terms = X_p_lambda_terms(traj, d, p, lambda, 0).back();
        CHECK(terms.low_l1 == 0.0);
        CHECK(terms.high_l1 == 0.0);
        CHECK(terms.damped_l1 == 0.0);
        CHECK(terms.v_l2 == 0.0);
        const double expected = hybrid_data_norm(s, d, p, lambda, 0).combined;
        CHECK(std::abs(terms.total() - expected) < 1e-13 * expected);
      }
    }
  }

  SUBCASE("time integrals of a decaying profile") {
    // (u, v)(t) = (e^{-t} u0, e^{-2t} v0): every term has a closed form in t.
    const SystemState s = random_state(g, 21);
    const double T = 2.0;
    const auto traj = scaled_copies(s, uniform_times(T, 2000),
                                    [](double t) { return std::pair{std::exp(-t), std::exp(-2 * t)}; });
    const double p = 3.0, lambda = 2.0;
    const int k = 0;
    const int J = j_threshold(lambda, k);
    const NormSpec base{1.0 / p, p, 1.0};
    const NormSpec top{1.5, 2.0, 1.0};

    const double low0 = besov_norm(s, d, base, Side::low, J);
    const double high0 = besov_norm(s, d, top, Side::high, J);
    const double reg_u = d.besov_norm(s.first, {1.0 / p + 2.0, p, 1.0}, Side::low, J);
    const double hu = d.besov_norm(s.first, top, Side::high, J);
    const double hv = d.besov_norm(s.second, top, Side::high, J);
    const double vb = d.besov_norm(s.second, base);
    const auto E1 = [&](double r) { return (1 - std::exp(-r * T)) / r; };

    const auto x = X_p_lambda_terms(traj, d, p, lambda, k).back();
    CHECK(std::abs(x.low_sup - low0) < 1e-12 * low0);
    CHECK(std::abs(x.high_sup - high0 / lambda) < 1e-12 * high0);
    CHECK(x.low_l1 == doctest::Approx(reg_u * E1(1) / lambda).epsilon(1e-6));
    CHECK(x.high_l1 == doctest::Approx(hu * E1(1) + hv * E1(2)).epsilon(1e-6));
    CHECK(x.v_l2 == doctest::Approx(std::sqrt(lambda * vb * vb * E1(4))).epsilon(1e-6));

    // the damped mode is not a scaled copy; integrate it directly with a fine Simpson rule
    double simpson = 0.0;
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
      const double t = T * i / n;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const Field z = std::exp(-t) * derivative(s.first) + lambda * std::exp(-2 * t) * s.second;
      simpson += w * d.besov_norm(z, base);
    }
    simpson *= T / n / 3.0;
    CHECK(x.damped_l1 == doctest::Approx(simpson).epsilon(1e-6));

    const auto series = X_p_lambda_series(traj, d, p, lambda, k);
    for (std::size_t i = 1; i < series.values.size(); ++i) CHECK(series.values[i] >= series.values[i - 1]);
    CHECK(series.values.back() == doctest::Approx(x.total()).epsilon(1e-14));
  }
}

TEST_CASE("X_p_lambda at lambda = 1 agrees with the reference functional") {
  const GridSpec g = GridSpec::dyadic(7, 3);
  const auto d = decomposition(g);
  const ToyModel model(ToyConfig{1.0, true});
  SimulationOptions opt;
  opt.horizon = 2.0;
  opt.snapshot_interval = 0.1;
  const Trajectory traj = simulate(random_state(g, 7, 0.1), model, opt);
  for (double p : {2.0, 2.5, 4.0}) {
    for (int J0 : {-2, 0}) {
      const double a = X_p_lambda(traj, d, p, 1.0, J0);
      const double b = X_p(traj, d, p, J0);
      CHECK(a > 0.0);
      CHECK(std::abs(a - b) < 1e-12 * b);
    }
  }
}

TEST_CASE("Lyapunov block equivalence") {
  const GridSpec g = GridSpec::dyadic(7, 2);
  const auto d = decomposition(g);
  const LyapunovSpec spec;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const SystemState s = random_state(g, seed, 1.0);
    for (int j = d.j_min(); j <= d.j_max(); ++j) {
      const Field uj = d.block(s.first, j), vj = d.block(s.second, j);
      const double sigma = sample_l2_squared(uj) + sample_l2_squared(vj) + sample_l2_squared(derivative(uj)) +
                           sample_l2_squared(derivative(vj));
      const double Lj2 = lyapunov_block_squared(s, d, j, spec);
      CHECK(Lj2 >= 0.5 * sigma - 1e-14 * (1 + sigma));
      CHECK(Lj2 <= 2.0 * sigma + 1e-14 * (1 + sigma));
      // cross term from samples
      const RealArray cross = vj.samples() * derivative(uj).samples();
      CHECK(Lj2 == doctest::Approx(sigma + cross.sum() * g.dx()).epsilon(1e-11));
    }
  }
}

TEST_CASE("Lyapunov functional on a single plateau mode") {
  // u = A cos(xi x) with xi = 1.4: only block 0 is active and phi_0(xi) = 1.
  const GridSpec g = plateau_grid(7, 0);
  const auto d = decomposition(g);
  const double A = 0.3, xi = 1.4, L = g.length();
  const Field u = Field::from_function(g, [&](double x) { return A * std::cos(xi * x); });
  const SystemState s{u, Field::zero(g), 0.0};
  const double L0 = std::sqrt(A * A * L / 2 * (1 + xi * xi));

  LyapunovSpec spec;
  spec.eta = 0.1;
  spec.J0 = -2;
  auto val = lyapunov(s, d, spec);
  CHECK(val.L == doctest::Approx(L0).epsilon(1e-12));
  CHECK(val.H == doctest::Approx(L0).epsilon(1e-12));

  // J0 = 0 brings the damped mode u_x = -A xi sin(xi x) into the low part
  spec.J0 = 0;
  val = lyapunov(s, d, spec);
  const double damped = 0.1 * A * xi * std::sqrt(L / 2);
  CHECK(val.L == doctest::Approx(L0 + damped).epsilon(1e-12));

  // lambda = 2 measures derivatives in units of 2 and weights block 0 by min(1, 1/4)
  spec.J0 = -2;
  spec.lambda = 2.0;
  val = lyapunov(s, d, spec);
  const double L0_scaled = std::sqrt(A * A * L / 2 * (1 + xi * xi / 4));
  CHECK(val.L == doctest::Approx(L0_scaled).epsilon(1e-12));
  CHECK(val.H == doctest::Approx(0.25 * L0_scaled).epsilon(1e-12));

  const auto zero = lyapunov(SystemState::zero(g), d, LyapunovSpec{});
  CHECK(zero.L == 0.0);
  CHECK(zero.H == 0.0);
}

TEST_CASE("Lyapunov variants") {
  const GridSpec g = GridSpec::dyadic(7, 2);
  const auto d = decomposition(g);
  const SystemState s = random_state(g, 9, 0.2);

  LyapunovSpec toy;
  const auto base = lyapunov(s, d, toy);

  SUBCASE("euler with n = 0 matches toy") {
    SystemState e{Field::zero(g), s.second, 0.0};
    LyapunovSpec spec;
    spec.variant = LyapunovVariant::euler;
    const auto a = lyapunov(e, d, spec);
    const auto b = lyapunov(e, d, toy);
    CHECK(a.L == doctest::Approx(b.L).epsilon(1e-14));
    CHECK(a.H == doctest::Approx(b.H).epsilon(1e-14));
  }

  SUBCASE("euler weight on a constant density") {
    const double c = 0.3;
    const PressureLaw law = PressureLaw::gamma_law(1.4);
    const double weight = 1.0 + G_of_n(c, law);
    SystemState e{Field::from_function(g, [&](double) { return c; }), s.second, 0.0};
    LyapunovSpec spec;
    spec.variant = LyapunovVariant::euler;
    spec.pressure = law;
    for (int j = d.j_min(); j <= d.j_max(); ++j) {
      const Field Vj = d.block(s.second, j);
      const double dV = sample_l2_squared(derivative(Vj));
      const double expected = sample_l2_squared(Vj) + (j >= spec.J0 ? weight : 1.0) * dV;
      CHECK(lyapunov_block_squared(e, d, j, spec) == doctest::Approx(expected).epsilon(1e-11));
    }
  }

  SUBCASE("general with zero weights matches toy") {
    LyapunovSpec spec;
    spec.variant = LyapunovVariant::general;
    const auto a = lyapunov(s, d, spec);
    CHECK(a.L == doctest::Approx(base.L).epsilon(1e-13));
    CHECK(a.H == doctest::Approx(base.H).epsilon(1e-13));
  }

  SUBCASE("general constant weights") {
    LyapunovSpec spec;
    spec.variant = LyapunovVariant::general;
    spec.general.V2 = [](double) { return 0.5; };
    spec.general.W1 = [](double, double) { return -0.25; };
    for (int j = d.j_min(); j <= d.j_max(); ++j) {
      const Field uj = d.block(s.first, j), vj = d.block(s.second, j);
      const double cross = inner_product(vj, derivative(uj));
      const double a = j >= spec.J0 ? 1.5 : 1.0, b = j >= spec.J0 ? 0.75 : 1.0;
      const double expected = sample_l2_squared(uj) + sample_l2_squared(vj) + cross +
                              a * sample_l2_squared(derivative(uj)) + b * sample_l2_squared(derivative(vj));
      CHECK(lyapunov_block_squared(s, d, j, spec) == doctest::Approx(expected).epsilon(1e-11));
    }
  }

  SUBCASE("H never exceeds L") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto v = lyapunov(random_state(g, seed), d, toy);
      CHECK(v.H <= v.L * (1 + 1e-15));
    }
  }
}

TEST_CASE("Lyapunov functional decreases along small toy solutions") {
  const GridSpec g = GridSpec::dyadic(7, 2);
  const auto d = decomposition(g);
  const ToyModel model(ToyConfig{1.0, true});
  SimulationOptions opt;
  opt.horizon = 5.0;
  opt.snapshot_interval = 0.05;
  const Trajectory traj = simulate(random_state(g, 13, 0.02), model, opt);
  for (double eta : {0.05, 0.1, 0.2}) {
    LyapunovSpec spec;
    spec.eta = eta;
    const auto series = lyapunov_series(traj, d, spec);
    for (std::size_t i = 1; i < series.values.size(); ++i)
      CHECK(series.values[i] <= series.values[i - 1] * (1 + 1e-6));
    CHECK(series.values.back() < series.values.front());
  }
}

TEST_CASE("decay fit") {
  const auto make = [](double T, int n, const std::function<double(double)>& f) {
    FunctionalSeries s;
    for (int i = 0; i <= n; ++i) {
      s.times.push_back(T * i / n);
      s.values.push_back(f(T * i / n));
    }
    return s;
  };

  const auto power = make(100.0, 1000, [](double t) { return 3.0 * std::pow(1 + t, -0.5); });
  auto fit = decay_fit(power, {1.0, 100.0}, 1.0);
  CHECK(std::abs(fit.slope + 0.5) < 1e-3);
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  // lambda and kappa0 enter only through kappa0 * lambda
  const auto scaled = make(100.0, 1000, [](double t) { return std::pow(1 + 6.0 * t, -1.25); });
  fit = decay_fit(scaled, {1.0, 100.0}, 2.0, 3.0);
  CHECK(fit.slope == doctest::Approx(-1.25).epsilon(1e-10));

  const auto flat = make(10.0, 100, [](double) { return 2.0; });
  fit = decay_fit(flat, {0.0, 10.0}, 1.0);
  CHECK(std::abs(fit.slope) < 1e-14);

  // exponential decay: compare against a QR least-squares solve on the same points
  const auto expo = make(50.0, 500, [](double t) { return std::exp(-t); });
  fit = decay_fit(expo, {5.0, 50.0}, 1.0);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < expo.times.size(); ++i) {
    if (expo.times[i] < 5.0 || expo.times[i] > 50.0) continue;
    xs.push_back(std::log(1 + expo.times[i]));
    ys.push_back(-expo.times[i]);
  }
  Eigen::MatrixXd Amat(xs.size(), 2);
  Eigen::VectorXd b(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Amat(i, 0) = xs[i];
    Amat(i, 1) = 1.0;
    b(i) = ys[i];
  }
  const Eigen::Vector2d coef = Amat.colPivHouseholderQr().solve(b);
  CHECK(fit.slope == doctest::Approx(coef(0)).epsilon(1e-10));
  CHECK(fit.slope < -2.0);

  auto bad = power;
  bad.values[500] = 0.0;
  CHECK_THROWS_AS(decay_fit(bad, {1.0, 100.0}, 1.0), FitError);
  CHECK_THROWS_AS(decay_fit(power, {1.0, 1.5}, 1.0), FitError);
  CHECK_NOTHROW(decay_fit(bad, {60.0, 100.0}, 1.0));
}

TEST_CASE("predicted decay exponents") {
  const auto e = predicted_decay(0.5, 0.5, 1.0, {1.0, 1.0, 1.0});
  CHECK(e.alpha1 == 0.5);
  CHECK(e.alpha2 == 1.0);
  CHECK(e.theta0 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(e.alpha == 0.5);
  CHECK(e.theta1 == 0.0);

  const auto f = predicted_decay(0.25, -0.25, 1.0, {});
  CHECK(f.alpha == 0.0);
  CHECK(f.theta1 == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(predicted_decay(0.2, 0.1, 3.0, {0.0, 0.0, 2.0}).kappa0 == 1.0);

  const double lambda = 2.0, s1 = 0.1;
  const DataNorms n{0.4, 0.7, 0.3};
  const auto g = predicted_decay(s1, 0.0, lambda, n);
  const double C0 = std::pow(lambda, 1.6) * 0.4 + 0.3;
  CHECK(g.C0_lambda == doctest::Approx(C0).epsilon(1e-14));
  CHECK(g.kappa0 == doctest::Approx(std::pow((lambda * 0.7 + 0.3) / C0, 2.0 / 0.6)).epsilon(1e-14));

  CHECK_THROWS_AS(predicted_decay(0.5, -0.6, 1.0, {}), RangeError);
  CHECK_THROWS_AS(predicted_decay(0.3, 0.6, 1.0, {}), RangeError);
  CHECK_THROWS_AS(predicted_decay(-0.5, 0.5, 1.0, {}), RangeError);
  CHECK_THROWS_AS(predicted_decay(0.6, 0.5, 1.0, {}), RangeError);
}

TEST_CASE("stability metric") {
  const GridSpec g = GridSpec::dyadic(7, 2);
  const auto d = decomposition(g);
  const ToyModel model(ToyConfig{1.0, true});
  SimulationOptions opt;
  opt.horizon = 3.0;
  opt.snapshot_interval = 0.1;
  const SystemState s0 = random_state(g, 17, 0.05);
  const Trajectory a = simulate(s0, model, opt);

  for (double v : stability_metric(a, a, d, 3.0, -2).values) CHECK(v == 0.0);

  SUBCASE("p = 2 is the full distance plus the shared threshold block") {
    SystemState pert = random_state(g, 99, 1e-4);
    const Trajectory b = simulate(SystemState{s0.first + pert.first, s0.second + pert.second, 0.0}, model, opt);
    const auto du = stability_metric(a, b, d, 2.0, -1);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const SystemState diff{b.states()[i].first - a.states()[i].first, b.states()[i].second - a.states()[i].second,
                             0.0};
      const double full = besov_norm(diff, d, {0.5, 2.0, 1.0});
      const double shared = std::pow(2.0, -0.5) * (lp_norm(d.block(diff.first, -1), 2.0) +
                                                   lp_norm(d.block(diff.second, -1), 2.0));
      CHECK(du.values[i] == doctest::Approx(full + shared).epsilon(1e-12));
    }
  }

  SUBCASE("linear-regime growth factor is stable as the perturbation halves") {
    std::vector<double> factors;
    for (double eps : {1e-3, 5e-4, 2.5e-4}) {
      SystemState pert = random_state(g, 99, eps);
      const Trajectory b =
          simulate(SystemState{s0.first + pert.first, s0.second + pert.second, 0.0}, model, opt);
      const auto du = stability_metric(a, b, d, 3.0, -2);
      double mx = 0.0;
      for (double v : du.values) mx = std::max(mx, v);
      factors.push_back(mx / du.values.front());
    }
    CHECK(factors[0] < 10.0);
    CHECK(std::abs(factors[1] / factors[0] - 1) < 0.05);
    CHECK(std::abs(factors[2] / factors[1] - 1) < 0.05);
  }

  SUBCASE("alignment") {
    SimulationOptions shorter = opt;
    shorter.horizon = 2.0;
    CHECK_THROWS_AS(stability_metric(a, simulate(s0, model, shorter), d, 3.0, -2), AlignmentError);
    SimulationOptions shifted = opt;
    shifted.snapshot_interval = 0.15;
    shifted.horizon = 3.0;
    CHECK_THROWS_AS(stability_metric(a, simulate(s0, model, shifted), d, 3.0, -2), AlignmentError);
    Trajectory other(GridSpec::dyadic(6, 2));
    other.append(SystemState::zero(other.grid()));
    CHECK_THROWS_AS(stability_metric(a, other, d, 3.0, -2), AlignmentError);
  }
}
