#pragma once

#include <vector>

#include "conespectra/series.hpp"

namespace cs {

/// Matrix polynomial sum_k C_k sigma^k with r x r coefficients. Only r = 1 is
/// supported by the root and germ routines.
struct MatrixPolynomial {
  std::vector<Mat> coeffs;

  static MatrixPolynomial scalar(std::vector<cplx> c);

  int size() const { return coeffs.empty() ? 1 : static_cast<int>(coeffs.front().rows()); }
  Mat operator()(cplx s) const;
  /// Monomial coefficients of the scalar polynomial (r = 1 only).
  std::vector<cplx> scalar_coeffs() const;
};

struct IndicialRoot {
  cplx sigma;
  int multiplicity = 1;
};

/// Roots of det P0 and the strip data for order m.
struct IndicialData {
  int m = 1;
  std::vector<IndicialRoot> roots;
  std::vector<IndicialRoot> strip_roots;  // -m/2 < Im sigma < m/2
  std::vector<int> N;                     // parallel to strip_roots

  /// Index into strip_roots of the root within 1e-8 of sigma, or -1.
  int find(cplx sigma) const;
};

/// Largest integer N with Im(sigma) - N > -m/2.
int lift_depth(cplx sigma, int m);

IndicialData boundary_spectrum(const MatrixPolynomial& P0, int m);

/// Germs are scalar Laurent series; principal parts carry the Mellin data.
using LaurentGerm = Laurent;

/// Laurent expansion of P(sigma)^{-1} at sigma0, regular part through `order`.
LaurentGerm invert_polynomial_germ(const MatrixPolynomial& P, cplx sigma0, int order);

/// Basis s_{sigma0}(P0^{-1} (sigma - sigma0)^l), l = 0 .. p-1, of the wedge germ space.
std::vector<LaurentGerm> germ_basis_wedge(const MatrixPolynomial& P0, int m, cplx sigma0);

/// The tower e_0 = psi, e_1, ..., e_N with e_t a principal part at sigma0 - i t.
/// Phat[k] is the k-th conormal symbol.
std::vector<LaurentGerm> theta_lift(const std::vector<MatrixPolynomial>& Phat, int m, cplx sigma0,
                                    const LaurentGerm& psi);

/// u(x) = omega(x) * sum_q a_q x^{i beta} (log x)^q near the endpoint.
/// Mellin convention: u^(sigma) = int_0^inf x^{-i sigma} u(x) dx/x, under which
/// omega x^{i beta} (log x)^q has principal part (-1)^q q! i^{q+1} / (sigma - beta)^{q+1}.
struct SingularFunction {
  cplx beta;
  std::vector<cplx> log_coeffs;  // a_0, a_1, ...
  double radius = 1.0;           // omega = 1 on [0, radius/4], 0 beyond radius/2

  cplx operator()(double x) const;
  /// x-derivative.
  cplx derivative(double x) const;
  /// Principal part of the Mellin transform at beta, as a Laurent series.
  LaurentGerm principal_part() const;
};

/// Smooth cutoff equal to 1 on [0, L/4] and 0 on [L/2, inf), with derivative.
double cutoff(double x, double L);
double cutoff_derivative(double x, double L);

SingularFunction germ_to_singular_function(const LaurentGerm& germ, int m, double radius = 1.0);

}  // namespace cs
