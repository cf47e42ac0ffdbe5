#include "conespectra/exppoly.hpp"

#include <algorithm>
#include <cmath>

#include "conespectra/error.hpp"

namespace cs {

cplx ExpPoly::operator()(cplx x) const {
  cplx v{};
  for (const auto& t : terms_) v += t.c * std::pow(x, t.n) * std::exp(t.beta * x);
  return v;
}

ExpPoly ExpPoly::derivative() const {
  std::vector<ExpTerm> out;
  for (const auto& t : terms_) {
    if (t.n > 0) out.push_back({t.c * double(t.n), t.n - 1, t.beta});
    if (t.beta != cplx{}) out.push_back({t.c * t.beta, t.n, t.beta});
  }
  ExpPoly r(std::move(out));
  r.simplify();
  return r;
}

ExpPoly ExpPoly::conj() const {
  std::vector<ExpTerm> out;
  for (const auto& t : terms_) out.push_back({std::conj(t.c), t.n, std::conj(t.beta)});
  return ExpPoly(std::move(out));
}

std::vector<cplx> ExpPoly::taylor(double x0, int n, double s) const {
  std::vector<cplx> out(n);
  for (const auto& t : terms_) {
    // (x0 + s t)^k
    std::vector<cplx> pw(n);
    double binom = 1.0;
    for (int j = 0; j <= t.n && j < n; ++j) {
      pw[j] = binom * std::pow(x0, t.n - j) * std::pow(s, j);
      binom = binom * double(t.n - j) / double(j + 1);
    }
    std::vector<cplx> ex(n);
    cplx term = t.c * std::exp(t.beta * x0);
    for (int k = 0; k < n; ++k) {
      ex[k] = term;
      term *= t.beta * s / double(k + 1);
    }
    auto prod = series_mul(pw, ex, n);
    for (int k = 0; k < n; ++k) out[k] += prod[k];
  }
  return out;
}

bool ExpPoly::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const ExpTerm& t) { return t.c == cplx{} || (t.n == 0 && t.beta == cplx{}); });
}

ExpPoly ExpPoly::operator+(const ExpPoly& o) const {
  std::vector<ExpTerm> out = terms_;
  out.insert(out.end(), o.terms_.begin(), o.terms_.end());
  ExpPoly r(std::move(out));
  r.simplify();
  return r;
}

ExpPoly ExpPoly::operator*(const ExpPoly& o) const {
  std::vector<ExpTerm> out;
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) out.push_back({a.c * b.c, a.n + b.n, a.beta + b.beta});
  ExpPoly r(std::move(out));
  r.simplify();
  return r;
}

ExpPoly ExpPoly::operator*(cplx a) const {
  std::vector<ExpTerm> out = terms_;
  for (auto& t : out) t.c *= a;
  ExpPoly r(std::move(out));
  r.simplify();
  return r;
}

void ExpPoly::simplify() {
  std::vector<ExpTerm> out;
  for (const auto& t : terms_) {
    auto it = std::find_if(out.begin(), out.end(), [&](const ExpTerm& u) { return u.n == t.n && u.beta == t.beta; });
    if (it == out.end())
      out.push_back(t);
    else
      it->c += t.c;
  }
  std::erase_if(out, [](const ExpTerm& t) { return t.c == cplx{}; });
  terms_ = std::move(out);
}

std::vector<cplx> series_mul(const std::vector<cplx>& a, const std::vector<cplx>& b, int n) {
  std::vector<cplx> c(n);
  for (int i = 0; i < n && i < int(a.size()); ++i)
    for (int j = 0; i + j < n && j < int(b.size()); ++j) c[i + j] += a[i] * b[j];
  return c;
}

std::vector<cplx> series_recip(const std::vector<cplx>& a, int n) {
  if (a.empty() || a[0] == cplx{}) throw Error(ErrorKind::NumericalBreakdown, "series reciprocal of a non-unit");
  std::vector<cplx> u(n);
  u[0] = 1.0 / a[0];
  for (int k = 1; k < n; ++k) {
    cplx acc{};
    for (int j = 1; j <= k && j < int(a.size()); ++j) acc += a[j] * u[k - j];
    u[k] = -acc / a[0];
  }
  return u;
}

}  // namespace cs
