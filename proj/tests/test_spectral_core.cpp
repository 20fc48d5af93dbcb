#include <cmath>
#include <complex>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "pdh/spectral.hpp"
#include "pdh/stepper.hpp"

using namespace pdh;
using cd = std::complex<double>;

namespace {

RealArray random_samples(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  RealArray x(n);
  for (Index i = 0; i < n; ++i) x(i) = g(rng);
  return x;
}

// Direct O(N^2) discrete transform, full spectrum index m in [0, N).
std::vector<cd> naive_dft(const RealArray& x) {
  const Index n = x.size();
  std::vector<cd> c(n);
  for (Index m = 0; m < n; ++m) {
    cd s = 0;
    for (Index k = 0; k < n; ++k)
      s += x(k) * std::polar(1.0, -2.0 * M_PI * double(m * k % n) / double(n));
    c[m] = s / double(n);
  }
  return c;
}

// Band-limited field with random coefficients on 1 <= |m| <= mmax.
Field random_band_field(const GridSpec& g, Index mmax, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  ComplexArray c = ComplexArray::Zero(g.spectrum_size());
  for (Index m = 1; m <= mmax; ++m) c(m) = cd(d(rng), d(rng));
  return Field::from_coefficients(g, c);
}

// Linear system u_t = -v_x, v_t = -u_x - lambda v; everything non-damped is "nonstiff".
class LinearModel : public Model {
 public:
  explicit LinearModel(double lambda) : lambda_(lambda) {}
  double damping() const override { return lambda_; }
  StateDerivative nonstiff(const SystemState& s) const override {
    return {-derivative(s.second), -derivative(s.first)};
  }
  double max_speed(const SystemState&) const override { return 1.0; }

 private:
  double lambda_;
};

class ZeroModel : public Model {
 public:
  double damping() const override { return 0.0; }
  StateDerivative nonstiff(const SystemState& s) const override {
    return {Field::zero(s.grid()), Field::zero(s.grid())};
  }
  double max_speed(const SystemState&) const override { return 0.0; }
};

// Exact mode-m amplitudes after time t via the 2x2 matrix exponential.
Eigen::Vector2cd exact_mode(double k, double lambda, double t, Eigen::Vector2cd z0) {
  Eigen::Matrix2cd A;
  A << cd(0), cd(0, -k), cd(0, -k), cd(-lambda);
  Eigen::Matrix2cd E = (A * t).exp();
  return E * z0;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(GridSpec(12, 1.0), GridError);
  CHECK_THROWS_AS(GridSpec(4, 1.0), GridError);
  CHECK_THROWS_AS(GridSpec(16, -1.0), GridError);
  GridSpec g = GridSpec::dyadic(5, 1);
  CHECK(g.points() == 32);
  CHECK(g.dx() * g.points() == doctest::Approx(g.length()));
  CHECK(g.fundamental() == doctest::Approx(0.5));
}

TEST_CASE("transform of constant and cosine") {
  GridSpec g(64, 3.0);
  Field one = Field::from_function(g, [](double) { return 1.0; });
  CHECK(std::abs(one.coefficient(0) - 1.0) < 1e-15);
  for (Index m = 1; m <= 32; ++m) CHECK(std::abs(one.coefficient(m)) < 1e-15);

  const Index m0 = 5;
  Field c = Field::from_function(g, [&](double x) { return std::cos(2 * M_PI * m0 * x / 3.0); });
  CHECK(std::abs(c.coefficient(m0)) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::abs(c.coefficient(-m0)) == doctest::Approx(0.5).epsilon(1e-13));
  for (Index m = -31; m <= 32; ++m)
    if (std::abs(m) != m0) CHECK(std::abs(c.coefficient(m)) < 1e-13);
  CHECK_THROWS_AS(c.coefficient(-32), IndexError);
  CHECK_THROWS_AS(c.coefficient(33), IndexError);
}

TEST_CASE("forward transform matches direct DFT and round-trips") {
  for (Index n : {8, 16, 64, 256}) {
    GridSpec g(n, 2.0);
    RealArray x = random_samples(n, 7 + unsigned(n));
    Field f = Field::from_samples(g, x);
    auto oracle = naive_dft(x);
    for (Index m = -n / 2 + 1; m <= n / 2; ++m)
      CHECK(std::abs(f.coefficient(m) - oracle[(m + n) % n]) < 1e-13);
    CHECK((f.samples() - x).abs().maxCoeff() < 1e-12);
    Field back = transform(transform(f, Direction::inverse), Direction::forward);
    CHECK((back.samples() - x).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("round trip over all sizes 8..2^16") {
  for (int e = 3; e <= 16; ++e) {
    GridSpec g = GridSpec::dyadic(e, 0);
    RealArray x = random_samples(g.points(), unsigned(e));
    Field f = Field::from_samples(g, x);
    CHECK((f.samples() - x).abs().maxCoeff() / x.abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("non power of two transform is rejected") {
  RealArray x = RealArray::Ones(12);
  CHECK_THROWS_AS(forward_transform<double>(x), GridError);
  ComplexArray c = ComplexArray::Zero(7);
  CHECK_THROWS_AS(inverse_transform<double>(c), GridError);
}

TEST_CASE("spectral derivatives") {
  GridSpec g = GridSpec::dyadic(7, 1);
  const double k = 3 * g.fundamental();
  Field s = Field::from_function(g, [&](double x) { return std::sin(k * x); });
  Field c = Field::from_function(g, [&](double x) { return std::cos(k * x); });
  CHECK((derivative(s).samples() - k * c.samples()).abs().maxCoeff() < 1e-11);
  CHECK((derivative(c, 2).samples() + k * k * c.samples()).abs().maxCoeff() < 1e-10);

  Field one = Field::from_function(g, [](double) { return 1.0; });
  CHECK(derivative(one).samples().abs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(derivative(one, 0), RangeError);
  CHECK_THROWS_AS(derivative(one, 5), RangeError);

  Field r = random_band_field(g, 40, 3);
  CHECK((derivative(derivative(r)).samples() - derivative(r, 2).samples()).abs().maxCoeff() < 1e-10);
  CHECK(std::abs(derivative(r, 3).mean()) == 0.0);
  Field sum = r + 2.0 * s;
  CHECK((derivative(sum).samples() - derivative(r).samples() - 2.0 * derivative(s).samples())
            .abs()
            .maxCoeff() < 1e-11);
}

TEST_CASE("dealiased product matches convolution oracle") {
  GridSpec g(64, 2 * M_PI);
  const Index K = g.dealias_cutoff();
  for (unsigned seed = 0; seed < 5; ++seed) {
    Field f = random_band_field(g, K, seed);
    Field h = random_band_field(g, K, 100 + seed);
    Field p = dealias_product(f, h);
    for (Index m = -31; m <= 32; ++m) {
      cd s = 0;
      for (Index a = -K; a <= K; ++a) {
        const Index b = m - a;
        if (std::abs(b) <= K) s += f.coefficient(a) * h.coefficient(b);
      }
      if (std::abs(m) > K) s = 0;
      CHECK(std::abs(p.coefficient(m) - s) < 1e-12);
    }
  }
}

TEST_CASE("dealiased product special cases") {
  GridSpec g(64, 2 * M_PI);
  Field f = random_band_field(g, 10, 1);
  Field one = Field::from_function(g, [](double) { return 1.0; });
  CHECK((dealias_product(f, one).samples() - f.samples()).abs().maxCoeff() < 1e-13);

  // modes 20 and 21 are inside the band but their sum frequency 41 is not
  Field a = Field::from_function(g, [](double x) { return std::cos(20 * x); });
  Field b = Field::from_function(g, [](double x) { return std::cos(21 * x); });
  Field ab = dealias_product(a, b);
  CHECK(std::abs(ab.coefficient(41 - 64)) == 0.0);
  CHECK(std::abs(ab.coefficient(1) - 0.25) < 1e-14);

  CHECK_THROWS_AS(dealias_product(f, Field::zero(GridSpec(32, 2 * M_PI))), GridError);
}

TEST_CASE("inner product equals rectangle rule") {
  GridSpec g(128, 5.0);
  Field f = random_band_field(g, 60, 4);
  Field h = random_band_field(g, 60, 5);
  const double direct = (f.samples() * h.samples()).sum() * g.dx();
  CHECK(inner_product(f, h) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("pure damping is exact") {
  GridSpec g = GridSpec::dyadic(6, 0);
  Field v = random_band_field(g, 10, 9);
  SystemState s(Field::zero(g), v, 0.0);
  class Damping : public Model {
   public:
    double damping() const override { return 3.0; }
    StateDerivative nonstiff(const SystemState& st) const override {
      return {Field::zero(st.grid()), Field::zero(st.grid())};
    }
    double max_speed(const SystemState&) const override { return 0.0; }
  } model;
  SystemState out = step(s, model, 0.7);
  CHECK(out.time == doctest::Approx(0.7));
  CHECK((out.second.coefficients() - std::exp(-2.1) * v.coefficients()).abs().maxCoeff() < 1e-15);
  CHECK(out.first.coefficients().abs().maxCoeff() == 0.0);
}

TEST_CASE("zero right-hand side leaves the state unchanged") {
  GridSpec g = GridSpec::dyadic(6, 0);
  SystemState s(random_band_field(g, 10, 1), random_band_field(g, 10, 2), 1.5);
  SystemState out = step(s, ZeroModel(), 0.25);
  CHECK(out.time == doctest::Approx(1.75));
  CHECK((out.first.coefficients() - s.first.coefficients()).abs().maxCoeff() < 1e-15);
  CHECK((out.second.coefficients() - s.second.coefficients()).abs().maxCoeff() < 1e-15);
}

TEST_CASE("step rejects bad time steps") {
  GridSpec g = GridSpec::dyadic(6, 0);
  SystemState s = SystemState::zero(g);
  LinearModel model(1.0);
  CHECK_THROWS_AS(step(s, model, 0.0), RangeError);
  CHECK_THROWS_AS(step(s, model, 10.0), RangeError);
}

TEST_CASE("non-finite output raises BlowupDetected") {
  GridSpec g = GridSpec::dyadic(5, 0);
  class Nan : public Model {
   public:
    double damping() const override { return 0.0; }
    StateDerivative nonstiff(const SystemState& st) const override {
      ComplexArray c = ComplexArray::Constant(st.grid().spectrum_size(), cd(NAN, 0));
      return {Field::from_coefficients(st.grid(), c), Field::zero(st.grid())};
    }
    double max_speed(const SystemState&) const override { return 1.0; }
  } model;
  try {
    step(SystemState::zero(g, 2.0), model, 0.01);
    FAIL("expected BlowupDetected");
  } catch (const BlowupDetected& e) {
    CHECK(e.time() == doctest::Approx(2.01));
  }
}

TEST_CASE("linear mode: one step error is third order, global error converges") {
  GridSpec g = GridSpec::dyadic(5, 0);
  const Index m = 3;
  const double k = g.wavenumber(m);
  const double lambda = 2.0;
  LinearModel model(lambda);
  Eigen::Vector2cd z0(cd(0.3, -0.1), cd(0.2, 0.4));

  auto mode_state = [&](Eigen::Vector2cd z) {
    ComplexArray a = ComplexArray::Zero(g.spectrum_size()), b = a;
    a(m) = z(0);
    b(m) = z(1);
    return SystemState(Field::from_coefficients(g, a), Field::from_coefficients(g, b));
  };

  // local error ~ dt^4
  double prev = 0;
  for (double dt : {0.04, 0.02, 0.01}) {
    SystemState out = step(mode_state(z0), model, dt);
    Eigen::Vector2cd exact = exact_mode(k, lambda, dt, z0);
    const double err = std::abs(out.first.coefficient(m) - exact(0)) +
                       std::abs(out.second.coefficient(m) - exact(1));
    if (prev > 0) CHECK(prev / err > 12.0);
    prev = err;
  }

  // global error over a fixed horizon
  const double T = 2.0;
  std::vector<double> errs;
  for (int n : {40, 80, 160}) {
    const double dt = T / n;
    SystemState s = mode_state(z0);
    for (int i = 0; i < n; ++i) s = step(s, model, dt);
    Eigen::Vector2cd exact = exact_mode(k, lambda, T, z0);
    errs.push_back(std::abs(s.first.coefficient(m) - exact(0)) +
                   std::abs(s.second.coefficient(m) - exact(1)));
  }
  CHECK(errs[0] / errs[1] >= 3.5);
  CHECK(errs[1] / errs[2] >= 3.5);
}
