#include "conespectra/mellin.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "conespectra/error.hpp"

namespace cs {

MatrixPolynomial MatrixPolynomial::scalar(std::vector<cplx> c) {
  MatrixPolynomial p;
  for (cplx x : c) p.coeffs.push_back(Mat::Constant(1, 1, x));
  return p;
}

Mat MatrixPolynomial::operator()(cplx s) const {
  const int r = size();
  Mat v = Mat::Zero(r, r);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * s + *it;
  return v;
}

std::vector<cplx> MatrixPolynomial::scalar_coeffs() const {
  if (size() != 1)
    throw Error(ErrorKind::UnsupportedSymbolStructure, fmt::format("{}x{} conormal symbol", size(), size()));
  std::vector<cplx> c;
  for (const auto& m : coeffs) c.push_back(m(0, 0));
  return c;
}

int IndicialData::find(cplx sigma) const {
  for (std::size_t i = 0; i < strip_roots.size(); ++i)
    if (std::abs(strip_roots[i].sigma - sigma) <= 1e-8 * std::max(1.0, std::abs(sigma))) return int(i);
  return -1;
}

int lift_depth(cplx sigma, int m) {
  return static_cast<int>(std::ceil(sigma.imag() + 0.5 * m - 1e-12)) - 1;
}

namespace {

std::vector<cplx> trimmed(std::vector<cplx> c) {
  double scale = 0.0;
  for (cplx x : c) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) throw Error(ErrorKind::DegenerateSymbol, "conormal symbol vanishes identically");
  while (std::abs(c.back()) <= 1e-14 * scale) c.pop_back();
  return c;
}

// Vanishing order of p at z, judged on the Taylor coefficients at z.
int vanishing_order(const std::vector<cplx>& p, cplx z, double tol) {
  auto t = taylor_shift(p, z);
  double scale = 0.0;
  for (cplx x : t) scale = std::max(scale, std::abs(x));
  int k = 0;
  while (k < int(t.size()) && std::abs(t[k]) <= tol * scale) ++k;
  return k;
}

}  // namespace

IndicialData boundary_spectrum(const MatrixPolynomial& P0, int m) {
  const auto c = trimmed(P0.scalar_coeffs());
  IndicialData out;
  out.m = m;
  const int n = int(c.size()) - 1;
  if (n > 0) {
    Mat C = Mat::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -c[i] / c[n];
    Eigen::ComplexEigenSolver<Mat> es(C, false);
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      // A k-fold root splits by ~eps^{1/k}; gather loosely, then accept the
      // cluster only if the polynomial really vanishes to that order at its mean.
      std::vector<int> loose{i}, tight{i};
      const double r = std::max(1.0, std::abs(ev[i]));
      for (int j = i + 1; j < n; ++j) {
        if (used[j]) continue;
        const double dist = std::abs(ev[j] - ev[i]);
        if (dist <= 1e-5 * r) loose.push_back(j);
        if (dist <= 1e-8 * r) tight.push_back(j);
      }
      auto mean_of = [&](const std::vector<int>& idx) {
        cplx s{};
        for (int j : idx) s += ev[j];
        return s / double(idx.size());
      };
      std::vector<int> pick = tight;
      if (loose.size() > tight.size() && vanishing_order(c, mean_of(loose), 1e-10) >= int(loose.size()))
        pick = loose;
      for (int j : pick) used[j] = true;
      cplx z = mean_of(pick);
      if (std::abs(z.real()) < 1e-14 * r) z.real(0.0);
      if (std::abs(z.imag()) < 1e-14 * r) z.imag(0.0);
      out.roots.push_back({z, int(pick.size())});
    }
    std::sort(out.roots.begin(), out.roots.end(), [](const IndicialRoot& a, const IndicialRoot& b) {
      return a.sigma.imag() != b.sigma.imag() ? a.sigma.imag() > b.sigma.imag() : a.sigma.real() < b.sigma.real();
    });
  }
  for (const auto& rt : out.roots) {
    if (std::abs(rt.sigma.imag()) < 0.5 * m - 1e-12) {
      out.strip_roots.push_back(rt);
      out.N.push_back(lift_depth(rt.sigma, m));
    }
  }
  return out;
}

LaurentGerm invert_polynomial_germ(const MatrixPolynomial& P, cplx sigma0, int order) {
  return reciprocal_at(P.scalar_coeffs(), sigma0, order);
}

std::vector<LaurentGerm> germ_basis_wedge(const MatrixPolynomial& P0, int m, cplx sigma0) {
  const auto data = boundary_spectrum(P0, m);
  const int idx = data.find(sigma0);
  if (idx < 0) throw Error(ErrorKind::NotABoundaryPoint, fmt::format("{}{:+}i is not a strip root", sigma0.real(), sigma0.imag()));
  const cplx s0 = data.strip_roots[idx].sigma;
  const int p = data.strip_roots[idx].multiplicity;
  const LaurentGerm inv = invert_polynomial_germ(P0, s0, p + 2);
  std::vector<LaurentGerm> out;
  for (int l = 0; l < p; ++l) {
    std::vector<cplx> mono(l + 1);
    mono[l] = 1.0;
    out.push_back((inv * Laurent(s0, 0, mono)).singular_part());
  }
  return out;
}

std::vector<LaurentGerm> theta_lift(const std::vector<MatrixPolynomial>& Phat, int m, cplx sigma0,
                                    const LaurentGerm& psi) {
  if (Phat.empty()) throw Error(ErrorKind::MissingTaylorData, "no conormal symbols");
  const int N = lift_depth(sigma0, m);
  if (N < 0 || std::abs(sigma0.imag()) >= 0.5 * m)
    throw Error(ErrorKind::OutOfStrip, "sigma0 outside the critical strip");
  const auto p0 = Phat[0].scalar_coeffs();
  std::vector<LaurentGerm> e{psi.singular_part()};
  for (int t = 1; t <= N; ++t) {
    const cplx beta = sigma0 - kI * double(t);
    Laurent R(beta, -1, {});
    for (int l = 0; l < t; ++l) {
      if (t - l >= int(Phat.size()))
        throw Error(ErrorKind::MissingTaylorData, fmt::format("conormal symbol {} missing", t - l));
      const auto pk = Laurent::polynomial_at(Phat[t - l].scalar_coeffs(), beta);
      R = R + pk * e[l].rebased(beta);
    }
    const int pole = std::max(1, R.pole_order());
    const Laurent inv = reciprocal_at(p0, beta, pole + 2);
    const Laurent et = (inv * R).singular_part() * cplx(-1.0);
    // The full sum at beta must be holomorphic.
    const Laurent check = Laurent::polynomial_at(p0, beta) * et + R;
    const double scale = std::max({1.0, R.principal_magnitude(), et.principal_magnitude()});
    if (check.principal_magnitude() > 1e-12 * scale)
      throw Error(ErrorKind::PrincipalPartMismatch,
                  fmt::format("residual principal part {:.3e} at lift {}", check.principal_magnitude(), t));
    e.push_back(et);
  }
  return e;
}

double cutoff(double x, double L) {
  const double s = (x - 0.25 * L) / (0.25 * L);
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
  return b / (a + b);
}

double cutoff_derivative(double x, double L) {
  const double s = (x - 0.25 * L) / (0.25 * L);
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
  const double da = a / (s * s), db = -b / ((1.0 - s) * (1.0 - s));
  return (db * (a + b) - b * (da + db)) / ((a + b) * (a + b)) / (0.25 * L);
}

cplx SingularFunction::operator()(double x) const {
  const double w = cutoff(x, radius);
  if (w == 0.0) return {};
  const double lx = std::log(x);
  cplx s{}, pw = 1.0;
  for (cplx a : log_coeffs) {
    s += a * pw;
    pw *= lx;
  }
  return w * std::exp(kI * beta * lx) * s;
}

cplx SingularFunction::derivative(double x) const {
  const double w = cutoff(x, radius), dw = cutoff_derivative(x, radius);
  if (w == 0.0 && dw == 0.0) return {};
  const double lx = std::log(x);
  cplx s{}, ds{}, pw = 1.0;
  for (std::size_t q = 0; q < log_coeffs.size(); ++q) {
    s += log_coeffs[q] * pw;
    if (q + 1 < log_coeffs.size()) ds += double(q + 1) * log_coeffs[q + 1] * pw;
    pw *= lx;
  }
  const cplx xb = std::exp(kI * beta * lx);
  return dw * xb * s + w * xb / x * (kI * beta * s + ds);
}

namespace {

// Principal-part coefficient of (sigma - beta)^{-(q+1)} for x^{i beta} (log x)^q.
cplx log_power_residue(int q) {
  double f = 1.0;
  for (int j = 2; j <= q; ++j) f *= j;
  return (q % 2 ? -f : f) * std::pow(kI, q + 1);
}

}  // namespace

LaurentGerm SingularFunction::principal_part() const {
  const int p = int(log_coeffs.size());
  std::vector<cplx> c(p);
  for (int q = 0; q < p; ++q) c[p - 1 - q] = log_coeffs[q] * log_power_residue(q);
  return Laurent(beta, -p, std::move(c));
}

SingularFunction germ_to_singular_function(const LaurentGerm& germ, int m, double radius) {
  const cplx b = germ.base();
  if (b.imag() <= -0.5 * m || b.imag() >= 0.5 * m)
    throw Error(ErrorKind::OutOfStrip, fmt::format("Im sigma0 = {} for order {}", b.imag(), m));
  const int p = germ.pole_order();
  SingularFunction u{b, std::vector<cplx>(p), radius};
  for (int q = 0; q < p; ++q) u.log_coeffs[q] = germ[-(q + 1)] / log_power_residue(q);
  return u;
}

}  // namespace cs
