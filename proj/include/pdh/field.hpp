#pragma once

#include <Eigen/Core>
#include <complex>
#include <utility>

#include "pdh/errors.hpp"
#include "pdh/fft.hpp"
#include "pdh/grid.hpp"

namespace pdh {

/// Real periodic function on a BasicGrid.
///
/// The half spectrum (m = 0..N/2) is authoritative; grid samples are
/// synthesized on request. Fields are immutable values and safe to share
/// between threads.
template <typename Scalar>
class BasicField {
 public:
  using Grid = BasicGrid<Scalar>;
  using Complex = std::complex<Scalar>;
  using RealArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using ComplexArray = Eigen::Array<Complex, Eigen::Dynamic, 1>;

  static BasicField zero(const Grid& grid) {
    return BasicField(grid, ComplexArray::Zero(grid.spectrum_size()));
  }

  static BasicField from_samples(const Grid& grid, const RealArray& samples) {
    if (samples.size() != grid.points())
      throw GridError("sample count does not match grid size");
    return BasicField(grid, forward_transform<Scalar>(samples));
  }

  template <typename Fn>
  static BasicField from_function(const Grid& grid, Fn&& fn) {
    RealArray x = grid.nodes();
    RealArray values(x.size());
    for (Index i = 0; i < x.size(); ++i) values(i) = fn(x(i));
    return from_samples(grid, values);
  }

  static BasicField from_coefficients(const Grid& grid, ComplexArray coeffs) {
    if (coeffs.size() != grid.spectrum_size())
      throw GridError("coefficient count does not match grid size");
    coeffs(0).imag(Scalar(0));
    coeffs(grid.nyquist()).imag(Scalar(0));
    return BasicField(grid, std::move(coeffs));
  }

  const Grid& grid() const { return grid_; }
  const ComplexArray& coefficients() const { return coeffs_; }

  /// Coefficient at any index m in (-N/2, N/2]; negative indices by Hermitian symmetry.
  Complex coefficient(Index m) const {
    const Index n = grid_.points();
    if (m <= -n / 2 || m > n / 2) throw IndexError("mode index outside (-N/2, N/2]");
    return m >= 0 ? coeffs_(m) : std::conj(coeffs_(-m));
  }

  RealArray samples() const { return inverse_transform<Scalar>(coeffs_); }

  Scalar mean() const { return coeffs_(0).real(); }

  /// sum over the full spectrum of |c_m|^2, i.e. (1/L) * ||f||_{L^2}^2.
  Scalar power() const {
    const Index ny = grid_.nyquist();
    Scalar s = Scalar(2) * coeffs_.abs2().sum() - coeffs_(0).real() * coeffs_(0).real() -
               std::norm(coeffs_(ny));
    return s;
  }

  BasicField without_mean() const {
    ComplexArray c = coeffs_;
    c(0) = Complex(0);
    return BasicField(grid_, std::move(c));
  }

  BasicField& operator+=(const BasicField& other) {
    check_same_grid(other);
    coeffs_ += other.coeffs_;
    return *this;
  }
  BasicField& operator-=(const BasicField& other) {
    check_same_grid(other);
    coeffs_ -= other.coeffs_;
    return *this;
  }
  BasicField& operator*=(Scalar a) {
    coeffs_ *= a;
    return *this;
  }

  friend BasicField operator+(BasicField a, const BasicField& b) { return a += b; }
  friend BasicField operator-(BasicField a, const BasicField& b) { return a -= b; }
  friend BasicField operator*(Scalar s, BasicField a) { return a *= s; }
  friend BasicField operator*(BasicField a, Scalar s) { return a *= s; }
  friend BasicField operator-(BasicField a) { return a *= Scalar(-1); }

  void check_same_grid(const BasicField& other) const {
    if (grid_ != other.grid_) throw GridError("fields live on different grids");
  }

 private:
  BasicField(const Grid& grid, ComplexArray coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {}

  Grid grid_;
  ComplexArray coeffs_;
};

using Field = BasicField<double>;
using RealArray = Field::RealArray;
using ComplexArray = Field::ComplexArray;

/// The pair of unknowns ((u,v), (n,V), ...) at one time.
struct SystemState {
  Field first;
  Field second;
  double time = 0.0;

  SystemState(Field a, Field b, double t = 0.0)
      : first(std::move(a)), second(std::move(b)), time(t) {
    first.check_same_grid(second);
  }

  static SystemState zero(const GridSpec& grid, double t = 0.0) {
    return SystemState(Field::zero(grid), Field::zero(grid), t);
  }

  const GridSpec& grid() const { return first.grid(); }
};

/// Time derivative of a SystemState.
struct StateDerivative {
  Field first;
  Field second;
};

}  // namespace pdh
