#include "conespectra/series.hpp"

#include <algorithm>
#include <cmath>

#include "conespectra/error.hpp"

namespace cs {

Laurent::Laurent(cplx base, int low, std::vector<cplx> coeffs, int high)
    : base_(base), low_(low), coeffs_(std::move(coeffs)), high_(high) {
  if (!exact() && low_ + static_cast<int>(coeffs_.size()) - 1 > high_)
    coeffs_.resize(std::max(0, high_ - low_ + 1));
}

Laurent Laurent::polynomial_at(const std::vector<cplx>& monomial_coeffs, cplx base) {
  return Laurent(base, 0, taylor_shift(monomial_coeffs, base));
}

cplx Laurent::operator[](int k) const {
  const int j = k - low_;
  if (j < 0 || j >= static_cast<int>(coeffs_.size())) return {};
  return coeffs_[j];
}

Laurent Laurent::operator*(const Laurent& o) const {
  const int low = low_ + o.low_;
  int high = kExact;
  if (!exact()) high = std::min(high, high_ + o.low_);
  if (!o.exact()) high = std::min(high, o.high_ + low_);
  const int n = static_cast<int>(coeffs_.size() + o.coeffs_.size()) - 1;
  std::vector<cplx> c(std::max(0, n));
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) c[i + j] += coeffs_[i] * o.coeffs_[j];
  return Laurent(base_, low, std::move(c), high);
}

Laurent Laurent::operator+(const Laurent& o) const {
  if (coeffs_.empty()) return Laurent(base_, o.low_, o.coeffs_, std::min(high_, o.high_));
  if (o.coeffs_.empty()) return Laurent(base_, low_, coeffs_, std::min(high_, o.high_));
  const int low = std::min(low_, o.low_);
  const int top = std::max(low_ + int(coeffs_.size()), o.low_ + int(o.coeffs_.size()));
  std::vector<cplx> c(top - low);
  for (int k = low; k < top; ++k) c[k - low] = (*this)[k] + o[k];
  return Laurent(base_, low, std::move(c), std::min(high_, o.high_));
}

Laurent Laurent::operator*(cplx a) const {
  std::vector<cplx> c = coeffs_;
  for (auto& x : c) x *= a;
  return Laurent(base_, low_, std::move(c), high_);
}

Laurent Laurent::singular_part() const {
  if (high_ < -1) throw Error(ErrorKind::PrincipalPartMismatch, "series truncated before the principal part");
  if (low_ >= 0) return Laurent(base_, -1, {});
  std::vector<cplx> c;
  for (int k = low_; k < 0; ++k) c.push_back((*this)[k]);
  return Laurent(base_, low_, std::move(c));
}

double Laurent::principal_magnitude() const {
  double m = 0.0;
  for (int k = low_; k < 0; ++k) m = std::max(m, std::abs((*this)[k]));
  return m;
}

int Laurent::pole_order(double tol) const {
  for (int k = low_; k < 0; ++k)
    if (std::abs((*this)[k]) > tol) return -k;
  return 0;
}

std::vector<cplx> taylor_shift(const std::vector<cplx>& a, cplx base) {
  // Repeated synthetic division (Horner) gives the coefficients at base.
  std::vector<cplx> c = a;
  const int n = static_cast<int>(c.size());
  for (int k = 0; k < n; ++k)
    for (int j = n - 2; j >= k; --j) c[j] += base * c[j + 1];
  return c;
}

cplx polyval(const std::vector<cplx>& c, cplx s) {
  cplx v{};
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
  return v;
}

Laurent reciprocal_at(const std::vector<cplx>& monomial_coeffs, cplx base, int order, double tol) {
  std::vector<cplx> t = taylor_shift(monomial_coeffs, base);
  double scale = 0.0;
  for (auto x : t) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) throw Error(ErrorKind::DegenerateSymbol, "polynomial vanishes identically");
  int mu = 0;
  while (mu < static_cast<int>(t.size()) && std::abs(t[mu]) <= tol * scale) ++mu;
  if (mu == static_cast<int>(t.size())) throw Error(ErrorKind::DegenerateSymbol, "polynomial vanishes identically");
  // 1/p = (s-base)^{-mu} / (t_mu + t_{mu+1} (s-base) + ...); invert the unit series.
  const int n = order + mu + 1;
  std::vector<cplx> u(n);
  u[0] = 1.0 / t[mu];
  for (int k = 1; k < n; ++k) {
    cplx acc{};
    for (int j = 1; j <= k && mu + j < static_cast<int>(t.size()); ++j) acc += t[mu + j] * u[k - j];
    u[k] = -acc / t[mu];
  }
  return Laurent(base, -mu, std::move(u), order);
}

}  // namespace cs
