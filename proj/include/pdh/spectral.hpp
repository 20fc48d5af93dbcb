#pragma once

#include <complex>
#include <string>

#include "pdh/field.hpp"

namespace pdh {

enum class Direction { forward, inverse };

/// Re-synchronizes a field through the transform pair (identity on values).
template <typename Scalar>
BasicField<Scalar> transform(const BasicField<Scalar>& f, Direction dir) {
  if (dir == Direction::forward) return BasicField<Scalar>::from_samples(f.grid(), f.samples());
  return BasicField<Scalar>::from_coefficients(f.grid(), f.coefficients());
}

/// Multiplier (i k_m)^order on the half spectrum; the Nyquist entry is zero for odd orders.
template <typename Scalar>
Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1> derivative_symbol(const BasicGrid<Scalar>& grid,
                                                                         int order) {
  using Complex = std::complex<Scalar>;
  const auto k = grid.wavenumbers();
  Eigen::Array<Complex, Eigen::Dynamic, 1> sym(k.size());
  for (Index m = 0; m < k.size(); ++m) sym(m) = std::pow(Complex(0, k(m)), order);
  if (order % 2 == 1) sym(grid.nyquist()) = Complex(0);
  return sym;
}

template <typename Scalar>
BasicField<Scalar> derivative(const BasicField<Scalar>& f, int order = 1) {
  if (order < 1 || order > 4) throw RangeError("derivative order must be in 1..4");
  return BasicField<Scalar>::from_coefficients(
      f.grid(), f.coefficients() * derivative_symbol(f.grid(), order));
}

/// Zeroes every mode with |m| above the two-thirds cutoff, in place.
template <typename Derived>
void truncate_to_band(Eigen::ArrayBase<Derived>& coeffs, Index cutoff) {
  const Index n = coeffs.size();
  if (cutoff + 1 < n) coeffs.tail(n - cutoff - 1).setZero();
}

template <typename Scalar>
BasicField<Scalar> dealias(const BasicField<Scalar>& f) {
  auto c = f.coefficients();
  truncate_to_band(c, f.grid().dealias_cutoff());
  return BasicField<Scalar>::from_coefficients(f.grid(), std::move(c));
}

/// Grid samples of f after truncation to the two-thirds band.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> band_samples(const BasicField<Scalar>& f) {
  auto c = f.coefficients();
  truncate_to_band(c, f.grid().dealias_cutoff());
  return inverse_transform<Scalar>(c);
}

/// Field from grid samples, truncated to the two-thirds band.
template <typename Scalar>
BasicField<Scalar> from_band_samples(const BasicGrid<Scalar>& grid,
                                     const Eigen::Array<Scalar, Eigen::Dynamic, 1>& samples) {
  auto c = forward_transform<Scalar>(samples);
  truncate_to_band(c, grid.dealias_cutoff());
  return BasicField<Scalar>::from_coefficients(grid, std::move(c));
}

/// Product of two fields under the two-thirds rule: both inputs and the
/// output are truncated to |m| <= N/3, which makes the result alias-free.
template <typename Scalar>
BasicField<Scalar> dealias_product(const BasicField<Scalar>& f, const BasicField<Scalar>& g) {
  f.check_same_grid(g);
  return from_band_samples(f.grid(), (band_samples(f) * band_samples(g)).eval());
}

/// Integral of f*g over the torus (discrete Parseval; equals the rectangle rule).
template <typename Scalar>
Scalar inner_product(const BasicField<Scalar>& f, const BasicField<Scalar>& g) {
  f.check_same_grid(g);
  const auto& a = f.coefficients();
  const auto& b = g.coefficients();
  const Index ny = f.grid().nyquist();
  Scalar s = Scalar(0);
  for (Index m = 1; m < ny; ++m) s += Scalar(2) * std::real(a(m) * std::conj(b(m)));
  s += std::real(a(0) * std::conj(b(0))) + std::real(a(ny) * std::conj(b(ny)));
  return s * f.grid().length();
}

/// Applies a real Fourier multiplier given on the half spectrum.
template <typename Scalar>
BasicField<Scalar> apply_multiplier(const BasicField<Scalar>& f,
                                    const Eigen::Array<Scalar, Eigen::Dynamic, 1>& symbol) {
  if (symbol.size() != f.coefficients().size()) throw GridError("multiplier size mismatch");
  return BasicField<Scalar>::from_coefficients(f.grid(), f.coefficients() * symbol.template cast<std::complex<Scalar>>());
}

}  // namespace pdh
