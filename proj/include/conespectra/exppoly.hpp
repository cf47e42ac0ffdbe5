#pragma once

#include <vector>

#include "conespectra/linalg.hpp"

namespace cs {

/// One term c * x^n * exp(beta x).
struct ExpTerm {
  cplx c;
  int n = 0;
  cplx beta{};
};

/// Finite sums of ExpTerm. Closed under products, derivatives and conjugation on
/// the real line, with exact Taylor coefficients at any point.
class ExpPoly {
 public:
  ExpPoly() = default;
  ExpPoly(cplx constant) : terms_{{constant, 0, 0.0}} {}  // NOLINT: implicit by design
  explicit ExpPoly(std::vector<ExpTerm> terms) : terms_(std::move(terms)) {}

  static ExpPoly monomial(cplx c, int n) { return ExpPoly({{c, n, 0.0}}); }
  static ExpPoly exponential(cplx c, cplx beta) { return ExpPoly({{c, 0, beta}}); }

  const std::vector<ExpTerm>& terms() const { return terms_; }

  cplx operator()(cplx x) const;
  ExpPoly derivative() const;
  /// Conjugate function for real arguments.
  ExpPoly conj() const;
  /// Taylor coefficients of t -> f(x0 + s t), t^0 .. t^{n-1}.
  std::vector<cplx> taylor(double x0, int n, double s = 1.0) const;
  bool is_constant() const;

  ExpPoly operator+(const ExpPoly& o) const;
  ExpPoly operator-(const ExpPoly& o) const { return *this + o * cplx(-1.0); }
  ExpPoly operator*(const ExpPoly& o) const;
  ExpPoly operator*(cplx a) const;

 private:
  void simplify();
  std::vector<ExpTerm> terms_;
};

/// Truncated power series helpers (coefficients of t^0 .. t^{n-1}).
std::vector<cplx> series_mul(const std::vector<cplx>& a, const std::vector<cplx>& b, int n);
std::vector<cplx> series_recip(const std::vector<cplx>& a, int n);

}  // namespace cs
