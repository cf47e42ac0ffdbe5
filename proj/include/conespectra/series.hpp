#pragma once

#include <limits>
#include <vector>

#include "conespectra/linalg.hpp"

namespace cs {

/// Laurent series sum_k c_k (s - base)^k for k = low .. low + coeffs.size() - 1.
/// Terms are exact through power `high`; exact finite sums carry high = kExact.
class Laurent {
 public:
  static constexpr int kExact = std::numeric_limits<int>::max() / 4;

  Laurent() = default;
  Laurent(cplx base, int low, std::vector<cplx> coeffs, int high = kExact);

  static Laurent polynomial_at(const std::vector<cplx>& monomial_coeffs, cplx base);

  cplx base() const { return base_; }
  int low() const { return low_; }
  int high() const { return high_; }
  bool exact() const { return high_ >= kExact; }
  /// Coefficient of (s - base)^k; zero outside the stored range.
  cplx operator[](int k) const;

  Laurent operator*(const Laurent& o) const;
  Laurent operator+(const Laurent& o) const;
  Laurent operator*(cplx a) const;

  /// Negative-power part; requires the series to be known through power -1.
  Laurent singular_part() const;
  /// Largest |c_k| over k < 0.
  double principal_magnitude() const;
  /// Leading pole order (0 when there is no principal part).
  int pole_order(double tol = 0.0) const;

  /// Same coefficients re-expanded at a different symbol (used for the shift
  /// s -> s + c, which moves the expansion point but keeps the coefficients).
  Laurent rebased(cplx new_base) const { return Laurent(new_base, low_, coeffs_, high_); }

 private:
  cplx base_{};
  int low_ = 0;
  std::vector<cplx> coeffs_;
  int high_ = kExact;
};

/// 1/p expanded at base, with the regular part known through power `order`.
/// Throws DegenerateSymbol when p vanishes identically.
Laurent reciprocal_at(const std::vector<cplx>& monomial_coeffs, cplx base, int order, double tol = 1e-10);

/// Taylor coefficients of p at `base` (exact shift of the monomial basis).
std::vector<cplx> taylor_shift(const std::vector<cplx>& monomial_coeffs, cplx base);

/// Evaluate sum_k c_k s^k.
cplx polyval(const std::vector<cplx>& c, cplx s);

}  // namespace cs
