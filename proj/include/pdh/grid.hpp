#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "pdh/errors.hpp"

namespace pdh {

using Index = Eigen::Index;

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

/// Uniform periodic grid on the torus [0, L).
///
/// Fourier coefficients are stored as a half spectrum m = 0..N/2; the physical
/// wavenumber of index m is 2*pi*m/L.
template <typename Scalar>
class BasicGrid {
 public:
  using RealArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  BasicGrid(Index points, Scalar length) : points_(points), length_(length) {
    if (points < 8 || !is_power_of_two(points))
      throw GridError("grid size must be a power of two >= 8, got " + std::to_string(points));
    if (!(length > Scalar(0)) || !std::isfinite(static_cast<double>(length)))
      throw GridError("domain length must be positive");
  }

  /// Torus of length 2*pi*2^log2_periods with 2^log2_points nodes.
  static BasicGrid dyadic(int log2_points, int log2_periods) {
    return BasicGrid(Index(1) << log2_points,
                     Scalar(2) * Scalar(EIGEN_PI) * std::ldexp(Scalar(1), log2_periods));
  }

  Index points() const { return points_; }
  Scalar length() const { return length_; }
  Scalar dx() const { return length_ / Scalar(points_); }
  Index spectrum_size() const { return points_ / 2 + 1; }
  Index nyquist() const { return points_ / 2; }

  /// Largest |m| kept by the two-thirds rule (3K < N).
  Index dealias_cutoff() const { return points_ / 3; }

  Scalar fundamental() const { return Scalar(2) * Scalar(EIGEN_PI) / length_; }
  Scalar wavenumber(Index m) const { return fundamental() * Scalar(m); }

  RealArray wavenumbers() const {
    return RealArray::LinSpaced(spectrum_size(), Scalar(0), Scalar(nyquist())) * fundamental();
  }

  RealArray nodes() const {
    return RealArray::LinSpaced(points_, Scalar(0), Scalar(points_ - 1)) * dx();
  }

  /// Same grid with the torus scaled by `factor` (frequencies scale by 1/factor).
  BasicGrid scaled(Scalar factor) const { return BasicGrid(points_, length_ * factor); }

  friend bool operator==(const BasicGrid& a, const BasicGrid& b) {
    return a.points_ == b.points_ && a.length_ == b.length_;
  }
  friend bool operator!=(const BasicGrid& a, const BasicGrid& b) { return !(a == b); }

 private:
  Index points_;
  Scalar length_;
};

using GridSpec = BasicGrid<double>;

}  // namespace pdh
