#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pdh/field.hpp"
#include "pdh/spectral.hpp"

namespace pdh {

/// Smooth even cutoff chi with chi = 1 on [-3/4, 3/4] and chi = 0 outside (-4/3, 4/3).
template <typename Scalar>
class BasicCutoffProfile {
 public:
  using Evaluator = std::function<Scalar(Scalar)>;

  BasicCutoffProfile() : chi_(&standard_chi) {}
  explicit BasicCutoffProfile(Evaluator chi) : chi_(std::move(chi)) {}

  Scalar chi(Scalar xi) const { return chi_(xi); }

  /// phi(xi) = chi(xi/2) - chi(xi), supported in [3/4, 8/3].
  Scalar phi(Scalar xi) const { return chi(xi / Scalar(2)) - chi(xi); }

  /// Smooth step from exp(-1/x): 1 for t <= 0, 0 for t >= 1.
  static Scalar smooth_step(Scalar t) {
    auto g = [](Scalar x) { return x > Scalar(0) ? std::exp(Scalar(-1) / x) : Scalar(0); };
    const Scalar a = g(Scalar(1) - t);
    const Scalar b = g(t);
    return a / (a + b);
  }

  static Scalar standard_chi(Scalar xi) {
    const Scalar lo = Scalar(3) / Scalar(4);
    const Scalar hi = Scalar(4) / Scalar(3);
    return smooth_step((std::abs(xi) - lo) / (hi - lo));
  }

 private:
  Evaluator chi_;
};

using CutoffProfile = BasicCutoffProfile<double>;

/// Besov exponents (s, p, r); p and r may be infinite.
struct NormSpec {
  double s = 0.0;
  double p = 2.0;
  double r = 1.0;
};

enum class Side { full, low, high };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Rectangle-rule L^p norm (max |f| for p = inf). p = 2 goes through Parseval, which is
/// the same quadrature.
template <typename Scalar>
Scalar lp_norm(const BasicField<Scalar>& f, Scalar p) {
  if (!(p >= Scalar(1))) throw RangeError("Lebesgue exponent must be >= 1");
  if (p == Scalar(2)) return std::sqrt(f.grid().length() * f.power());
  const auto x = f.samples();
  if (std::isinf(static_cast<double>(p))) return x.abs().maxCoeff();
  const Scalar m = x.abs().maxCoeff();
  if (m == Scalar(0)) return Scalar(0);
  return m * std::pow((x.abs() / m).pow(p).sum() * f.grid().dx(), Scalar(1) / p);
}

/// l^r combination of a sequence of nonnegative terms.
template <typename Scalar>
Scalar lr_sum(const std::vector<Scalar>& terms, Scalar r) {
  if (terms.empty()) return Scalar(0);
  if (std::isinf(static_cast<double>(r))) return *std::max_element(terms.begin(), terms.end());
  if (r == Scalar(1)) {
    Scalar s = 0;
    for (Scalar t : terms) s += t;
    return s;
  }
  const Scalar m = *std::max_element(terms.begin(), terms.end());
  if (m == Scalar(0)) return Scalar(0);
  Scalar s = 0;
  for (Scalar t : terms) s += std::pow(t / m, r);
  return m * std::pow(s, Scalar(1) / r);
}

/// Homogeneous Littlewood-Paley blocks phi(2^{-j} D) on a fixed grid.
///
/// Block j is stored as the contiguous run of half-spectrum indices where
/// phi(2^{-j} xi_m) is nonzero. The mean mode belongs to no block.
template <typename Scalar>
class BasicDyadicDecomposition {
 public:
  using Grid = BasicGrid<Scalar>;
  using FieldT = BasicField<Scalar>;
  using RealArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  static BasicDyadicDecomposition build(const BasicCutoffProfile<Scalar>& profile, const Grid& grid) {
    return BasicDyadicDecomposition(profile, grid);
  }

  const Grid& grid() const { return grid_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  int size() const { return j_max_ - j_min_ + 1; }
  bool contains(int j) const { return j >= j_min_ && j <= j_max_; }
  const BasicCutoffProfile<Scalar>& profile() const { return profile_; }

  /// phi(2^{-j} xi_m) on the half spectrum.
  RealArray multiplier(int j) const {
    check(j);
    const auto& b = blocks_[j - j_min_];
    RealArray out = RealArray::Zero(grid_.spectrum_size());
    out.segment(b.begin, b.values.size()) = b.values;
    return out;
  }

  /// Sum over all blocks of the multipliers (1 on the resolved band, 0 at the mean).
  RealArray multiplier_sum() const {
    RealArray out = RealArray::Zero(grid_.spectrum_size());
    for (const auto& b : blocks_) out.segment(b.begin, b.values.size()) += b.values;
    return out;
  }

  FieldT block(const FieldT& f, int j) const {
    check(j);
    check_grid(f);
    const auto& b = blocks_[j - j_min_];
    typename FieldT::ComplexArray c = FieldT::ComplexArray::Zero(grid_.spectrum_size());
    c.segment(b.begin, b.values.size()) =
        f.coefficients().segment(b.begin, b.values.size()) * b.values.template cast<std::complex<Scalar>>();
    return FieldT::from_coefficients(grid_, std::move(c));
  }

  /// Sum of blocks j <= J. J = j_min - 1 gives zero.
  FieldT lowpass(const FieldT& f, int J) const {
    if (J < j_min_ - 1 || J > j_max_)
      throw IndexError("lowpass threshold " + std::to_string(J) + " outside [" +
                       std::to_string(j_min_ - 1) + ", " + std::to_string(j_max_) + "]");
    return apply_range(f, j_min_, J);
  }

  /// Sum of blocks j > J (strict high part).
  FieldT highpass(const FieldT& f, int J) const {
    if (J < j_min_ - 1 || J > j_max_)
      throw IndexError("highpass threshold " + std::to_string(J) + " outside range");
    return apply_range(f, J + 1, j_max_);
  }

  /// ||Delta_j f||_{L^p} for j = j_min..j_max.
  RealArray block_norms(const FieldT& f, Scalar p) const {
    check_grid(f);
    RealArray out(size());
    const Scalar L = grid_.length();
    const Index ny = grid_.nyquist();
    for (int i = 0; i < size(); ++i) {
      const auto& b = blocks_[i];
      if (p == Scalar(2)) {
        Scalar s = 0;
        for (Index k = 0; k < b.values.size(); ++k) {
          const Index m = b.begin + k;
          const Scalar w = (m == ny) ? Scalar(1) : Scalar(2);
          s += w * std::norm(f.coefficients()(m)) * b.values(k) * b.values(k);
        }
        out(i) = std::sqrt(L * s);
      } else {
        out(i) = lp_norm(block(f, j_min_ + i), p);
      }
    }
    return out;
  }

  /// Besov semi-norm assembled from precomputed block norms.
  Scalar besov_from_blocks(const RealArray& norms, Scalar s, Scalar r, Side side, int J) const {
    int lo = j_min_, hi = j_max_;
    if (side == Side::low) hi = std::min(hi, J);
    if (side == Side::high) lo = std::max(lo, J);
    std::vector<Scalar> terms;
    for (int j = lo; j <= hi; ++j) terms.push_back(std::pow(Scalar(2), s * j) * norms(j - j_min_));
    return lr_sum(terms, r);
  }

  Scalar besov_norm(const FieldT& f, const NormSpec& spec, Side side = Side::full, int J = 0) const {
    if (spec.p < 1 || spec.r < 1) throw RangeError("Besov exponents p and r must be >= 1");
    return besov_from_blocks(block_norms(f, Scalar(spec.p)), Scalar(spec.s), Scalar(spec.r), side, J);
  }

  /// Fraction of the (mean-free) L^2 energy of f not reconstructed by the finite block range.
  Scalar truncation_residual(const FieldT& f) const {
    check_grid(f);
    const Scalar total = f.without_mean().power();
    if (total == Scalar(0)) return Scalar(0);
    const FieldT rest = f.without_mean() - apply_range(f, j_min_, j_max_);
    return rest.power() / total;
  }

 private:
  struct Block {
    Index begin = 0;
    RealArray values;
  };

  BasicDyadicDecomposition(const BasicCutoffProfile<Scalar>& profile, const Grid& grid)
      : grid_(grid), profile_(profile) {
    const Scalar xi_min = grid.fundamental();
    const Scalar xi_max = grid.wavenumber(grid.nyquist());
    j_min_ = static_cast<int>(std::floor(std::log2(xi_min * Scalar(3) / Scalar(4))));
    j_max_ = static_cast<int>(std::ceil(std::log2(xi_max * Scalar(2) / Scalar(3))));
    if (j_max_ - j_min_ + 1 < 3) throw GridError("grid too small for three dyadic blocks");
    const auto xi = grid.wavenumbers();
    for (int j = j_min_; j <= j_max_; ++j) {
      const Scalar scale = std::ldexp(Scalar(1), -j);
      Index first = -1, last = -1;
      RealArray vals = RealArray::Zero(xi.size());
      for (Index m = 1; m < xi.size(); ++m) {
        vals(m) = profile.phi(xi(m) * scale);
        if (vals(m) != Scalar(0)) {
          if (first < 0) first = m;
          last = m;
        }
      }
      Block b;
      if (first >= 0) {
        b.begin = first;
        b.values = vals.segment(first, last - first + 1);
      } else {
        b.values = RealArray(0);
      }
      blocks_.push_back(std::move(b));
    }
  }

  FieldT apply_range(const FieldT& f, int lo, int hi) const {
    check_grid(f);
    RealArray sym = RealArray::Zero(grid_.spectrum_size());
    for (int j = std::max(lo, j_min_); j <= std::min(hi, j_max_); ++j) {
      const auto& b = blocks_[j - j_min_];
      sym.segment(b.begin, b.values.size()) += b.values;
    }
    return apply_multiplier(f, sym);
  }

  void check(int j) const {
    if (!contains(j))
      throw IndexError("block index " + std::to_string(j) + " outside [" + std::to_string(j_min_) +
                       ", " + std::to_string(j_max_) + "]");
  }

  void check_grid(const FieldT& f) const {
    if (f.grid() != grid_) throw GridError("field grid differs from the decomposition grid");
  }

  Grid grid_;
  BasicCutoffProfile<Scalar> profile_;
  int j_min_ = 0;
  int j_max_ = 0;
  std::vector<Block> blocks_;
};

using DyadicDecomposition = BasicDyadicDecomposition<double>;

/// J_lambda = floor(log2 lambda) + k.
inline int j_threshold(double lambda, int k) {
  if (!(lambda > 0.0)) throw RangeError("lambda must be positive");
  return static_cast<int>(std::floor(std::log2(lambda))) + k;
}

/// Norm of a pair, taken as the sum of the component norms.
inline double besov_norm(const SystemState& s, const DyadicDecomposition& d, const NormSpec& spec,
                         Side side = Side::full, int J = 0) {
  return d.besov_norm(s.first, spec, side, J) + d.besov_norm(s.second, spec, side, J);
}

struct HybridNorm {
  double low = 0.0;
  double high = 0.0;
  double combined = 0.0;
};

/// Low part in B^{1/p}_{p,1} and high part in B^{3/2}_{2,1} at J_lambda; combined = low + high/lambda.
inline HybridNorm hybrid_data_norm(const SystemState& s, const DyadicDecomposition& d, double p,
                                   double lambda, int k) {
  if (p < 2.0 || p > 4.0) throw RangeError("hybrid data norm needs 2 <= p <= 4");
  const int J = j_threshold(lambda, k);
  HybridNorm h;
  h.low = besov_norm(s, d, {1.0 / p, p, 1.0}, Side::low, J);
  h.high = besov_norm(s, d, {1.5, 2.0, 1.0}, Side::high, J);
  h.combined = h.low + h.high / lambda;
  return h;
}

}  // namespace pdh
