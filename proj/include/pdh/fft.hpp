#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>
#include <unsupported/Eigen/FFT>

#include "pdh/grid.hpp"

namespace pdh {

namespace detail {

// Eigen's kissfft backend keeps mutable scratch buffers, so each thread owns one.
template <typename Scalar>
Eigen::FFT<Scalar>& thread_fft() {
  thread_local Eigen::FFT<Scalar> fft = [] {
    Eigen::FFT<Scalar> f;
    f.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
    f.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    return f;
  }();
  return fft;
}

}  // namespace detail

/// Samples -> normalized half spectrum c_m = (1/N) sum_n f_n exp(-2 pi i m n / N), m = 0..N/2.
template <typename Scalar>
Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1> forward_transform(
    const Eigen::Array<Scalar, Eigen::Dynamic, 1>& samples) {
  const Index n = samples.size();
  if (n < 2 || !is_power_of_two(n))
    throw GridError("transform length must be a power of two, got " + std::to_string(n));
  Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1> coeffs(n / 2 + 1);
  detail::thread_fft<Scalar>().fwd(coeffs.data(), samples.data(), n);
  coeffs /= Scalar(n);
  coeffs(0).imag(Scalar(0));
  coeffs(n / 2).imag(Scalar(0));
  return coeffs;
}

/// Half spectrum -> samples f_n = sum_m c_m exp(2 pi i m n / N) over the full Hermitian spectrum.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> inverse_transform(
    const Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>& coeffs) {
  const Index n = 2 * (coeffs.size() - 1);
  if (n < 2 || !is_power_of_two(n))
    throw GridError("transform length must be a power of two, got " + std::to_string(n));
  Eigen::Array<Scalar, Eigen::Dynamic, 1> samples(n);
  detail::thread_fft<Scalar>().inv(samples.data(), coeffs.data(), n);
  return samples;
}

}  // namespace pdh
