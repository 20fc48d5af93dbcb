#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pdh/field.hpp"
#include "pdh/littlewood_paley.hpp"

namespace pdh {

/// One evaluation of an inequality LHS <= C RHS.
struct RatioReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs; 0 when both vanish, inf when only rhs does
  std::string inputs;

  static RatioReport make(double lhs, double rhs, std::string inputs);
};

/// Largest ratio over a set of evaluations.
double fitted_constant(const std::vector<RatioReport>& reports);

// ---------------------------------------------------------------------------
// Inputs
//
// Checks multiply fields pointwise on the grid, so inputs must live in |m| < N/4: the
// product of two such fields is then resolved exactly. Dilation keeps the coefficients and
// shrinks the torus, which is the exact analogue of f -> f(2^k .) on the line.

enum class InputFamily { random_band, packet, multiscale };

std::string to_string(InputFamily family);

/// Random phases and amplitudes on the modes with xi in [xi_min, xi_max].
Field random_band_field(const GridSpec& grid, double xi_min, double xi_max, std::uint64_t seed);

/// Delta_j of a bump centered at x0: coefficients phi(2^{-j} xi) e^{-i xi x0}, unit peak.
Field packet_field(const GridSpec& grid, const CutoffProfile& profile, int j, double x0);

/// sum_{j=j_lo}^{j_hi} 2^{-js} cos(1.4 2^j x + theta_j). 1.4 2^j must be a grid wavenumber.
Field multiscale_field(const GridSpec& grid, double s, int j_lo, int j_hi, std::uint64_t seed);

/// Standard lab input of a family on a grid of length 10 pi 2^a, centered on block j.
/// Seeds select independent members of the family.
Field family_member(InputFamily family, const GridSpec& grid, int j, std::uint64_t seed);

/// Same coefficients on the torus shortened by 2^k.
Field dilate(const Field& f, int k);

/// Throws ContractError unless f has no modes with |m| >= N/4.
void require_quarter_band(const Field& f, const std::string& name);

// ---------------------------------------------------------------------------
// Bernstein-type lower bound on an annulus R1 lambda <= |xi| <= R2 lambda:
//   ratio = lambda^2 (p-1)/p int |f|^p / ((p-1) int |f'|^2 |f|^{p-2}); the fitted c is 1/max ratio.

RatioReport check_bernstein(const Field& f, double p, double lambda, double R1 = 0.75, double R2 = 8.0 / 3.0);

// ---------------------------------------------------------------------------
// Commutator estimates

enum class CommutatorVariant { com1, com2, com3 };

struct CommutatorReport {
  std::vector<int> j;
  std::vector<RatioReport> per_j;  // lhs_j against c_j * rhs (com1, com2) or rhs (com3)
  std::vector<double> c;           // normalized per-block mass of the left-hand side
  RatioReport aggregate;           // the fitted constant is aggregate.ratio
};

/// com1: 2^{js} ||[w, Delta_j] v_x||_p        <= C c_j ||w_x||_{B^{1/p}_{p,1}} ||v||_{B^s_{p,1}}
/// com3: sup_j 2^{js} ||[w, Delta_j] v_x||_p  <= C ||w_x||_{B^{1/p}_{p,1}} ||v||_{B^s_{p,inf}}
/// com2: 2^{js} ||([w, Delta_j] v)_x||_p      <= C c_j ||w_x||_{B^{1/p}_{p,1}} ||v||_{B^s_{p,1}}
CommutatorReport check_commutator(const Field& w, const Field& v, double s, double p, CommutatorVariant variant,
                                  const DyadicDecomposition& d);

/// ||[Delta_j, a] b||_r against 2^{-j} ||a_x||_q ||b||_p with 1/r = 1/p + 1/q, for j in [j_lo, j_hi].
std::vector<RatioReport> check_block_commutator(const Field& a, const Field& b, double p, double q,
                                                const DyadicDecomposition& d, int j_lo, int j_hi);

// ---------------------------------------------------------------------------
// Product laws
//
// Hybrid right-hand sides mix terms with different dilation weights. Each term is multiplied
// by 2^{J (w_lhs - w_term)}, which leaves it unchanged at J = 0 and makes the ratio invariant
// when the inputs are dilated by 2^k and J moves to J + k.

enum class ProductVariant { prod1, prod2, prod3, prod4 };

struct ProductParams {
  double s = 0.5;
  double p = 2.0;
  double r = 1.0;
  int J = 0;
};

/// prod1: ||ab||_{B^s_{p,r}} <= C (||a||_inf ||b||_{B^s_{p,r}} + ||a||_{B^s_{p,r}} ||b||_inf), s > 0
/// prod2: ||ab||_{B^s_{p,1}} <= C ||a||_{B^{1/p}_{p,1}} ||b||_{B^s_{p,1}}, -min(1/p,1/p') < s <= 1/p
/// prod3: ||ab||^l_{B^s_{p,1}} <= C (||a||_inf + ||a||_{B^{1/p+1}_{p,1}}) ||b||_{B^{s-1}_{p,1}},
///        -min(1/p,1/p') < s <= 1/p + 1
/// prod4: ||ab||_{B^{1/2}_{2,1}} <= C (||a||^l_{B^{1/p-1}_{p,1}} + ||a||^h_{B^{1/2}_{2,1}})
///        (||b||^l_{B^{2/p-1/2}_{p,1}} + ||b||^h_{B^{1/2}_{2,1}}), 2 <= p <= 4
RatioReport check_product_law(const Field& a, const Field& b, ProductVariant variant, const ProductParams& params,
                              const DyadicDecomposition& d);

// ---------------------------------------------------------------------------
// Composition

struct CompositionReport {
  RatioReport ratio;             // ||f(u)|| / ||u||
  double derivative_bound = 0;   // sup |f'| over [min u, max u]
};

/// Needs f(0) = 0 (ContractError otherwise) and 0 < s < 1/p, or s = 1/p with r = 1.
CompositionReport check_composition(const std::function<double(double)>& f, const Field& u, const NormSpec& spec,
                                    const DyadicDecomposition& d);

// ---------------------------------------------------------------------------
// Low/high commutator remainder
//   R_j = S_{j-1} w (Delta_j z)_x - Delta_j (w z_x) = R1_j + R2_j + R3_j
//   R1_j = -Delta_j T'_{z_x} w
//   R2_j = -sum_{|j'-j|<=4} [Delta_j, S_{j'-1} w] (Delta_{j'} z)_x
//   R3_j = -sum_{|j'-j|<=1} (S_{j'-1} w - S_{j-1} w) Delta_j Delta_{j'} z_x

struct RemainderReport {
  RatioReport total;   // sum_{j>=J0} 2^{js} ||R_j||_2 against the four-term bound
  RatioReport piece1;  // sum over all j of 2^{js} ||R1_j||_2
  RatioReport piece2;  // sum_{j>=J0}
  RatioReport piece3;  // sum_{j>=J0}
  double identity_residual = 0.0;  // max_j ||R_j - R1_j - R2_j - R3_j|| / max_j ||R_j||
};

/// p in [2, 4], s in [1/2, 3/2]; s = 3/2 uses the endpoint bound. w must have zero mean.
RemainderReport check_remainder(const Field& w, const Field& z, double s, double p, int J0,
                                const DyadicDecomposition& d);

// ---------------------------------------------------------------------------
// Differential inequality: (1/p) d/dt X^p + B X^p = A X^{p-1} implies
//   X(t) + B int_0^t X <= X0 + int_0^t A.

struct OdeLemmaTrace {
  std::vector<double> t;
  std::vector<double> X;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> slack;  // rhs - lhs
  double min_slack = 0.0;
  bool holds = false;         // min_slack >= -1e-10 (1 + rhs scale)
};

/// Integrates Y = X^p with classical RK4 on a uniform grid of `steps` steps.
OdeLemmaTrace ode_lemma_demo(const std::function<double(double)>& A, double B, double X0, double p, double horizon,
                             int steps = 4000);

// ---------------------------------------------------------------------------
// Dilation study

struct DilationStudy {
  std::vector<double> constants;  // fitted constant per level
  double spread = 0.0;            // max / min - 1 over the levels with a positive constant
};

/// `evaluate(level)` returns the reports of one input family dilated by 2^level.
DilationStudy study_dilation(const std::function<std::vector<RatioReport>(int)>& evaluate, int levels);

}  // namespace pdh
