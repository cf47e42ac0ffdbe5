#include "conespectra/cone1d.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "conespectra/error.hpp"

namespace cs {

std::string to_string(Side s) { return s == Side::Left ? "left" : "right"; }

namespace {

constexpr int kSeries = 20;

double sign_of(Side s) { return s == Side::Left ? 1.0 : -1.0; }

// Taylor coefficients of 1 / l(t).
std::vector<cplx> inv_l(const ConeOperator1D& op, int n) {
  std::vector<cplx> c(n);
  if (op.is_half_line()) {
    c[0] = 1.0;
    return c;
  }
  const double L = op.chart_radius();
  for (int k = 0; k < n; ++k) c[k] = std::pow(1.0 / L, k + 1);
  return c;
}

double coefficient_bandwidth(const ConeOperator1D& op) {
  double bw = 1.0;
  for (const auto* f : {&op.p(), &op.q()})
    for (const auto& t : f->terms()) bw = std::max(bw, std::abs(t.beta) + t.n);
  return bw;
}

double inv_p_max(const ConeOperator1D& op) {
  if (op.is_half_line()) return 1.0 / std::abs(op.p_at(0.0));
  double m = 0.0;
  for (int i = 0; i <= 200; ++i) m = std::max(m, 1.0 / std::abs(op.p_at(op.a() + (op.b() - op.a()) * i / 200.0)));
  return m;
}

}  // namespace

ConeOperator1D ConeOperator1D::interval(double a, double b, ExpPoly p, ExpPoly q) {
  if (!(a < b)) throw Error(ErrorKind::UnsupportedOperator, "interval needs a < b");
  ConeOperator1D op;
  op.a_ = a;
  op.b_ = b;
  op.p_ = std::move(p);
  op.q_ = std::move(q);
  double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 400; ++i) {
    const double v = std::abs(op.p_(a + (b - a) * i / 400.0));
    pmax = std::max(pmax, v);
    pmin = std::min(pmin, v);
  }
  if (!(pmin > 1e-10 * pmax)) throw Error(ErrorKind::UnsupportedOperator, "leading coefficient vanishes");
  for (Side s : op.singular_sides()) op.indicial_root(s);
  return op;
}

ConeOperator1D ConeOperator1D::half_line(cplx p, cplx q) {
  if (p == cplx{}) throw Error(ErrorKind::UnsupportedOperator, "leading coefficient vanishes");
  ConeOperator1D op;
  op.half_line_ = true;
  op.a_ = 0.0;
  op.b_ = std::numeric_limits<double>::infinity();
  op.p_ = ExpPoly(p);
  op.q_ = ExpPoly(q);
  op.indicial_root(Side::Left);
  return op;
}

std::vector<Side> ConeOperator1D::singular_sides() const {
  if (half_line_) return {Side::Left};
  return {Side::Left, Side::Right};
}

ExpPoly ConeOperator1D::boundary_function() const {
  if (half_line_) return ExpPoly::monomial(1.0, 1);
  return ExpPoly({{-1.0, 2, 0.0}, {a_ + b_, 1, 0.0}, {-a_ * b_, 0, 0.0}});
}

ConeOperator1D ConeOperator1D::formal_adjoint() const {
  ConeOperator1D op = *this;
  op.p_ = p_.conj();
  op.q_ = q_.conj() - boundary_function() * p_.conj().derivative() * kI;
  return op;
}

std::vector<cplx> ConeOperator1D::taylor_lead(Side s, int n) const {
  const double sg = sign_of(s);
  auto pt = p_.taylor(endpoint(s), n, sg);
  std::vector<cplx> out = pt;
  if (!half_line_) out = series_mul(pt, {chart_radius(), -1.0}, n);
  for (auto& c : out) c *= sg;
  return out;
}

std::vector<cplx> ConeOperator1D::taylor_q(Side s, int n) const { return q_.taylor(endpoint(s), n, sign_of(s)); }

cplx ConeOperator1D::indicial_root(Side s) const {
  const cplx sigma = -taylor_q(s, 1)[0] / taylor_lead(s, 1)[0];
  const double margin = 0.5 - std::abs(sigma.imag());
  if (std::abs(margin) <= 1e-6)
    throw Error(ErrorKind::AmbiguousMembership,
                fmt::format("indicial root {:.6g}{:+.6g}i at the integrability threshold", sigma.real(), sigma.imag()));
  if (margin < 0.0)
    throw Error(ErrorKind::UnsupportedOperator,
                fmt::format("indicial root {:.6g}{:+.6g}i outside |Im| < 1/2", sigma.real(), sigma.imag()));
  return sigma;
}

cplx ConeOperator1D::potential(double x) const {
  if (half_line_) return q_(x) / x;
  return q_(x) / ((b_ - x) * (x - a_));
}

bool ConeOperator1D::is_symmetric(double tol) const {
  const auto adj = formal_adjoint();
  const double hi = half_line_ ? 10.0 : b_;
  for (int i = 0; i <= 200; ++i) {
    const double x = a_ + (hi - a_) * i / 200.0;
    const cplx p = p_(x);
    if (std::abs(p.imag()) > tol * std::abs(p)) return false;
    const cplx dq = adj.q()(x) - q_(x);
    if (std::abs(dq) > tol * std::max(1.0, std::abs(q_(x)))) return false;
  }
  return true;
}

std::vector<MatrixPolynomial> conormal_symbols(const ConeOperator1D& op, Side s, int count) {
  if (op.is_half_line() && s == Side::Right)
    throw Error(ErrorKind::MissingTaylorData, "the half-line has no right endpoint");
  const auto a = op.taylor_lead(s, count);
  const auto q = op.taylor_q(s, count);
  std::vector<MatrixPolynomial> out;
  for (int k = 0; k < count; ++k) out.push_back(MatrixPolynomial::scalar({a[k] * kI * double(k) + q[k], a[k]}));
  return out;
}

ConeOperator1D wedge_model(const ConeOperator1D& op, Side s) {
  if (op.is_half_line()) {
    if (s == Side::Right) throw Error(ErrorKind::MissingTaylorData, "the half-line has no right endpoint");
    return op;
  }
  return ConeOperator1D::half_line(op.taylor_lead(s, 1)[0], op.taylor_q(s, 1)[0]);
}

double SampledFunction::l2_norm() const {
  Vec a = values.cwiseAbs2().cast<cplx>();
  return std::sqrt(std::max(0.0, grid->integrate(a).real()));
}

cplx l2_inner(const SampledFunction& u, const SampledFunction& v) {
  return u.grid->integrate(u.values.cwiseProduct(v.values.conjugate()));
}

namespace {

// Potential at node i, with the endpoint distance taken from the grid where it is exact.
cplx node_potential(const ConeOperator1D& op, const Grid& g, int i) {
  const double x = g.x()[i];
  if (g.kind(i) == Grid::Map::Linear || op.is_half_line()) return op.potential(x);
  const double t = g.dist(i), L = op.b() - op.a();
  return op.q()(x) / (t * (L - t));
}

}  // namespace

SampledFunction apply_operator(const ConeOperator1D& op, const SampledFunction& u) {
  const auto& x = u.grid->x();
  Vec du = u.grid->derivative(u.values);
  Vec out(u.values.size());
  for (int i = 0; i < out.size(); ++i)
    out(i) = -kI * op.p_at(x[i]) * du(i) + node_potential(op, *u.grid, i) * u.values(i);
  return {u.grid, out};
}

cplx graph_inner(const ConeOperator1D& op, const SampledFunction& u, const SampledFunction& v) {
  return l2_inner(apply_operator(op, u), apply_operator(op, v)) + l2_inner(u, v);
}

double operator_residual(const ConeOperator1D& op, cplx lambda, const SampledFunction& u, const Rhs& f) {
  const Grid& g = *u.grid;
  const auto& x = g.x();
  const auto& w = g.weights();
  Vec du = g.derivative(u.values);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < u.values.size(); ++i) {
    // Spectral derivatives lose digits like eps / t at the innermost log nodes.
    if (g.kind(i) != Grid::Map::Linear && g.dist(i) < kResidualInner * op.chart_radius()) continue;
    const cplx a = -kI * op.p_at(x[i]) * du(i), b = (node_potential(op, g, i) - lambda) * u.values(i);
    const cplx fi = f ? f(x[i]) : cplx{};
    if (!std::isfinite(std::abs(a) + std::abs(b))) continue;
    num += w[i] * std::norm(a + b - fi);
    den += w[i] * (std::norm(a) + std::norm(b) + std::norm(fi) + std::norm(u.values(i)));
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

Rhs kappa(double rho, Rhs u) {
  return [rho, u = std::move(u)](double x) { return std::sqrt(rho) * u(rho * x); };
}

Rhs as_rhs(const SampledFunction& u) {
  return [u](double x) { return u(x); };
}

Mat EmaxBasis::from_metric(const Mat& y) const { return metric.partialPivLu().solve(y); }

// ---------------------------------------------------------------- kernels

bool kernel_in_domain(const ConeOperator1D& op, cplx lambda) {
  if (!op.is_half_line()) return true;
  const cplx r = lambda / op.p_at(0.0);
  const double scale = std::abs(r);
  if (std::abs(r.imag()) <= 1e-14 * scale) return false;
  if (std::abs(r.imag()) < 1e-6 * scale)
    throw Error(ErrorKind::AmbiguousMembership,
                fmt::format("decay rate {:.3e} of the kernel is within tolerance of zero", r.imag()));
  return r.imag() > 0.0;
}

namespace {

// Series S(t) = sum_{k>=1} M_k t^k / k with log h = log Z + i sigma0 log t + S(t).
std::vector<cplx> log_series(const ConeOperator1D& op, Side s, cplx lambda) {
  const int n = kSeries + 1;
  const double sg = sign_of(s);
  const auto pt = op.p().taylor(op.endpoint(s), n, sg);
  const auto qt = op.taylor_q(s, n);
  auto inner = series_mul(qt, inv_l(op, n), n);
  for (auto& c : inner) c = -c;
  inner[1] += lambda;
  auto M = series_mul(inner, series_recip(pt, n), n);
  std::vector<cplx> S(n);
  for (int k = 1; k < n; ++k) S[k] = sg * kI * M[k] / double(k);
  return S;
}

cplx log_local(const std::vector<cplx>& S, cplx sigma0, double t) {
  cplx v = kI * sigma0 * std::log(t);
  double pw = t;
  for (std::size_t k = 1; k < S.size(); ++k, pw *= t) v += S[k] * pw;
  return v;
}

cplx log_derivative(const ConeOperator1D& op, double x, cplx lambda) {
  return kI * (lambda - op.potential(x)) / op.p_at(x);
}

struct KernelSample {
  std::shared_ptr<const Grid> grid;
  Vec h;
  Vec Z;                  // germs of h at the singular sides
  std::vector<cplx> sigma0;
  bool in_domain = true;
};

// log h on an interval grid with log Z_L = 0; returns log Z_R.
cplx interval_log_kernel(const ConeOperator1D& op, cplx lambda, const Grid& g, Vec* logh) {
  const double a = op.a(), b = op.b(), L = op.chart_radius();
  const double t0 = kSeedFraction * L;
  const cplx sL = op.indicial_root(Side::Left), sR = op.indicial_root(Side::Right);
  const auto SL = log_series(op, Side::Left, lambda), SR = log_series(op, Side::Right, lambda);
  const auto& x = g.x();
  const int n = g.size();
  Vec gv = Vec::Zero(n);
  int iL = -1, iR = -1;
  for (int i = 0; i < n; ++i) {
    if (g.kind(i) != Grid::Map::Linear) continue;
    gv(i) = log_derivative(op, x[i], lambda);
    if (iL < 0) iL = i;
    iR = i;
  }
  // Log panels carry zeros; only differences across the linear part are used.
  Vec C = g.cumulative(gv);
  const cplx logL0 = log_local(SL, sL, x[iL] - a);
  const cplx logR0 = logL0 + C(iR) - C(iL);
  const cplx logZR = logR0 - log_local(SR, sR, b - x[iR]);
  (void)t0;
  if (logh) {
    logh->resize(n);
    for (int i = 0; i < n; ++i) {
      switch (g.kind(i)) {
        case Grid::Map::LogLeft: (*logh)(i) = log_local(SL, sL, g.dist(i)); break;
        case Grid::Map::LogRight: (*logh)(i) = logZR + log_local(SR, sR, g.dist(i)); break;
        case Grid::Map::Linear: (*logh)(i) = logL0 + C(i) - C(iL); break;
      }
    }
  }
  return logZR;
}

KernelSample sample_kernel(const ConeOperator1D& op, cplx lambda, std::shared_ptr<const Grid> grid) {
  KernelSample k;
  k.grid = grid;
  const auto& x = grid->x();
  if (op.is_half_line()) {
    const cplx p = op.p_at(0.0), s0 = op.indicial_root(Side::Left);
    k.sigma0 = {s0};
    k.in_domain = kernel_in_domain(op, lambda);
    k.h.resize(grid->size());
    for (int i = 0; i < grid->size(); ++i) k.h(i) = std::exp(kI * s0 * std::log(x[i]) + kI * lambda * x[i] / p);
    k.Z = Vec::Ones(1);
    return k;
  }
  k.sigma0 = {op.indicial_root(Side::Left), op.indicial_root(Side::Right)};
  Vec logh;
  const cplx logZR = interval_log_kernel(op, lambda, *grid, &logh);
  double shift = logh.real().maxCoeff();
  shift = std::max(shift, logZR.real());
  k.h = (logh.array() - shift).exp().matrix();
  k.Z.resize(2);
  k.Z << std::exp(-shift), std::exp(logZR - shift);
  return k;
}

std::shared_ptr<const Grid> grid_for(const ConeOperator1D& op, cplx lambda, double extra_bw, double x_max) {
  const double bw = std::abs(lambda) * inv_p_max(op) + coefficient_bandwidth(op) + extra_bw;
  if (op.is_half_line()) return make_halfline_grid(x_max, bw);
  return make_interval_grid(op.a(), op.b(), bw);
}

double default_x_max(const ConeOperator1D& op, cplx lambda) {
  const double gamma = std::abs((lambda / op.p_at(0.0)).imag());
  return 40.0 * std::max(1.0, 1.0 / std::max(gamma, 1e-3));
}

}  // namespace

Vec kernel_germs(const ConeOperator1D& op, cplx lambda) {
  if (op.is_half_line()) return kernel_in_domain(op, lambda) ? Vec::Ones(1) : Vec(0);
  // The log-derivative is smooth in x at fixed lambda; no lambda-dependent resolution needed.
  thread_local std::shared_ptr<const Grid> cached;
  thread_local double ca = 0, cb = 0, cbw = 0;
  const double bw = coefficient_bandwidth(op) + inv_p_max(op);
  if (!cached || ca != op.a() || cb != op.b() || cbw != bw) {
    cached = make_interval_grid(op.a(), op.b(), bw);
    ca = op.a();
    cb = op.b();
    cbw = bw;
  }
  Vec Z(2);
  Z << 1.0, std::exp(interval_log_kernel(op, lambda, *cached, nullptr));
  return Z;
}

KernelFrame kernel_frame(const ConeOperator1D& op, cplx lambda, const FrameOptions& opt) {
  KernelFrame out;
  out.lambda = lambda;
  const int d = static_cast<int>(op.singular_sides().size());
  const bool present = kernel_in_domain(op, lambda);
  if (!present) {
    out.Z = Mat(d, 0);
    return out;
  }
  const double x_max = op.is_half_line() ? (opt.x_max > 0 ? opt.x_max : default_x_max(op, lambda)) : 0.0;
  auto grid = grid_for(op, lambda, opt.bandwidth, x_max);
  auto k = sample_kernel(op, lambda, grid);
  SampledFunction h{grid, k.h};
  out.functions.push_back(h);
  out.Z = k.Z;
  out.dmin_flag.push_back(k.Z.norm() <= 1e-300);
  out.residual = operator_residual(op, lambda, h);
  if (!(out.residual < 1e-8))
    throw Error(ErrorKind::NumericalBreakdown, fmt::format("kernel residual {:.3e}", out.residual));
  return out;
}

// ---------------------------------------------------------------- E_max

namespace {

using State = std::array<double, 8>;
using C2 = Eigen::Vector2cd;
using M2 = Eigen::Matrix2cd;

// y' = F(x) y for y = (u, A u) solving (A* A + 1) u = 0.
M2 system_matrix(const ConeOperator1D& op, const ConeOperator1D& adj, double x) {
  const cplx p = op.p_at(x), pb = std::conj(p);
  M2 F;
  F << -kI * op.potential(x) / p, kI / p, -kI / pb, -kI * adj.potential(x) / pb;
  return F;
}

// Two Frobenius solutions t^{alpha_b} sum Y_k t^k of t y' = M(t) y at a side.
struct SystemSeries {
  cplx alpha[2];
  std::vector<C2> Y[2];

  C2 eval(int branch, double t) const {
    C2 s = C2::Zero();
    double pw = 1.0;
    for (const auto& y : Y[branch]) {
      s += y * pw;
      pw *= t;
    }
    return std::exp(alpha[branch] * std::log(t)) * s;
  }
};

SystemSeries system_series(const ConeOperator1D& op, Side side) {
  const int n = kSeries + 1;
  const double sg = sign_of(side);
  const double e = op.endpoint(side);
  const auto pt = op.p().taylor(e, n, sg);
  const auto pbt = op.p().conj().taylor(e, n, sg);
  const auto ip = series_recip(pt, n), ipb = series_recip(pbt, n);
  const auto il = inv_l(op, n);
  const auto q_l = series_mul(op.q().taylor(e, n, sg), il, n);
  const auto qb_l = series_mul(op.q().conj().taylor(e, n, sg), il, n);
  const auto dpb = op.p().conj().derivative().taylor(e, n, sg);
  auto m11 = series_mul(q_l, ip, n);
  auto m22 = series_mul(qb_l, ipb, n);
  auto m22b = series_mul(dpb, ipb, n);
  std::vector<M2> M(n);
  for (int k = 0; k < n; ++k) {
    M[k](0, 0) = -kI * sg * m11[k];
    M[k](0, 1) = k >= 1 ? sg * kI * ip[k - 1] : cplx{};
    M[k](1, 0) = k >= 1 ? -sg * kI * ipb[k - 1] : cplx{};
    M[k](1, 1) = -kI * sg * m22[k] - (k >= 1 ? sg * m22b[k - 1] : cplx{});
  }
  SystemSeries S;
  for (int b = 0; b < 2; ++b) {
    S.alpha[b] = M[0](b, b);
    S.Y[b].assign(n, C2::Zero());
    S.Y[b][0](b) = 1.0;
    for (int k = 1; k < n; ++k) {
      C2 rhs = C2::Zero();
      for (int j = 1; j <= k; ++j) rhs += M[j] * S.Y[b][k - j];
      M2 lhs = (S.alpha[b] + double(k)) * M2::Identity() - M[0];
      if (std::abs(lhs.determinant()) < 1e-12)
        throw Error(ErrorKind::NumericalBreakdown, "resonant indicial exponents");
      S.Y[b][k] = lhs.inverse() * rhs;
    }
  }
  return S;
}

void pack(const C2& a, const C2& b, State& s) {
  s = {a(0).real(), a(0).imag(), a(1).real(), a(1).imag(), b(0).real(), b(0).imag(), b(1).real(), b(1).imag()};
}
C2 unpack(const State& s, int b) { return C2(cplx(s[4 * b], s[4 * b + 1]), cplx(s[4 * b + 2], s[4 * b + 3])); }

// March two solutions from x0 through the sorted (in direction of travel) stations.
std::vector<State> march(const ConeOperator1D& op, const ConeOperator1D& adj, double x0, const State& y0,
                         const std::vector<double>& stations) {
  namespace odeint = boost::numeric::odeint;
  const double dir = stations.empty() || stations.back() >= x0 ? 1.0 : -1.0;
  auto rhs = [&](const State& y, State& dy, double tau) {
    const M2 F = system_matrix(op, adj, dir * tau) * dir;
    for (int b = 0; b < 2; ++b) {
      const C2 v = F * unpack(y, b);
      dy[4 * b] = v(0).real();
      dy[4 * b + 1] = v(0).imag();
      dy[4 * b + 2] = v(1).real();
      dy[4 * b + 3] = v(1).imag();
    }
  };
  // Station to station with the state rescaled to unit size: per-component error
  // control otherwise stalls on components sitting at roundoff next to growing ones.
  std::vector<State> out;
  out.reserve(stations.size());
  State y = y0;
  double tau = dir * x0, dt = 1e-4;
  auto stepper = odeint::make_controlled(1e-13, 1e-10, odeint::runge_kutta_dopri5<State>());
  for (double x : stations) {
    double scale = 0.0;
    for (double v : y) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    for (double& v : y) v /= scale;
    const double next = dir * x;
    if (next > tau) {
      odeint::integrate_adaptive(stepper, rhs, y, tau, next, std::min(dt, next - tau),
                                 [&](const State&, double) {});
    }
    for (double& v : y) v *= scale;
    tau = std::max(tau, next);
    out.push_back(y);
  }
  return out;
}

}  // namespace

EmaxBasis emax_basis(const ConeOperator1D& op) {
  const ConeOperator1D adj = op.formal_adjoint();
  EmaxBasis E;
  E.sides = op.singular_sides();
  E.d = static_cast<int>(E.sides.size());
  const double L = op.chart_radius();
  const double t0 = kSeedFraction * L;
  for (Side s : E.sides) {
    E.sigma.push_back(op.indicial_root(s));
    E.reps.push_back(SingularFunction{E.sigma.back(), {1.0}, L});
  }
  const double bw = inv_p_max(op) + coefficient_bandwidth(op);

  if (op.is_half_line()) {
    const double pabs = std::abs(op.p_at(0.0));
    const double x_max = 40.0 * pabs;
    auto grid = make_halfline_grid(x_max, bw);
    E.grid = grid;
    const auto S = system_series(op, Side::Left);
    Eigen::ComplexEigenSolver<M2> es(system_matrix(op, adj, x_max));
    int k = es.eigenvalues()(0).real() < es.eigenvalues()(1).real() ? 0 : 1;
    C2 y_end = es.eigenvectors().col(k);
    const auto& x = grid->x();
    std::vector<double> stations;
    std::vector<int> station_of(grid->size(), -1);
    for (int i = grid->size() - 1; i >= 0; --i) {
      if (x[i] > t0 * (1.0 + 1e-9) && x[i] < x_max) {
        if (stations.empty() || x[i] < stations.back()) stations.push_back(x[i]);
        station_of[i] = static_cast<int>(stations.size()) - 1;
      }
    }
    stations.push_back(t0);
    State y0;
    pack(y_end, C2::Zero(), y0);
    auto traj = march(op, adj, x_max, y0, stations);
    const C2 at_t0 = unpack(traj.back(), 0);
    M2 B;
    B.col(0) = S.eval(0, t0);
    B.col(1) = S.eval(1, t0);
    const C2 c = B.partialPivLu().solve(at_t0);
    if (std::abs(c(0)) < 1e-300) throw Error(ErrorKind::NumericalBreakdown, "E_max solution has no germ");
    Vec u(grid->size()), w(grid->size());
    std::vector<C2> vals(grid->size());
    for (int i = 0; i < grid->size(); ++i) {
      if (x[i] >= x_max)
        vals[i] = y_end;
      else if (station_of[i] >= 0)
        vals[i] = unpack(traj[station_of[i]], 0);
      else
      {
        const double t = grid->kind(i) == Grid::Map::LogLeft ? grid->dist(i) : x[i];
        vals[i] = c(0) * S.eval(0, t) + c(1) * S.eval(1, t);
      }
    }
    for (int i = 0; i < grid->size(); ++i) {
      u(i) = vals[i](0) / c(0);
      w(i) = vals[i](1) / c(0);
    }
    E.u.push_back({grid, u});
    E.w.push_back({grid, w});
    E.agerm = Mat::Constant(1, 1, c(1) / c(0));
    E.kappa_gen = FlowGenerator(Mat::Constant(1, 1, 0.5 + kI * E.sigma[0]));
  } else {
    auto grid = make_interval_grid(op.a(), op.b(), bw);
    E.grid = grid;
    const auto SL = system_series(op, Side::Left), SR = system_series(op, Side::Right);
    const double a = op.a(), b = op.b();
    const auto& x = grid->x();
    std::vector<double> stations;
    std::vector<int> station_of(grid->size(), -1);
    for (int i = 0; i < grid->size(); ++i) {
      if (x[i] - a > t0 * (1.0 + 1e-9) && b - x[i] > t0 * (1.0 + 1e-9)) {
        if (stations.empty() || x[i] > stations.back()) stations.push_back(x[i]);
        station_of[i] = static_cast<int>(stations.size()) - 1;
      }
    }
    stations.push_back(b - t0);
    State y0;
    pack(SL.eval(0, t0), SL.eval(1, t0), y0);
    auto traj = march(op, adj, a + t0, y0, stations);
    M2 BR;
    BR.col(0) = SR.eval(0, t0);
    BR.col(1) = SR.eval(1, t0);
    Eigen::PartialPivLU<M2> lu(BR);
    // Right-side Frobenius coefficients of the two left branches.
    M2 R;
    R.col(0) = lu.solve(unpack(traj.back(), 0));
    R.col(1) = lu.solve(unpack(traj.back(), 1));
    if (std::abs(R(0, 1)) < 1e-14 * R.norm())
      throw Error(ErrorKind::NumericalBreakdown, "E_max germ map is singular");
    // Left-branch combinations with u-germs (1, 0) and (0, 1).
    M2 Cb;
    Cb.col(0) = C2(1.0, -R(0, 0) / R(0, 1));
    Cb.col(1) = C2(0.0, 1.0 / R(0, 1));
    E.agerm.resize(2, 2);
    for (int c = 0; c < 2; ++c) {
      Vec u(grid->size()), w(grid->size());
      const C2 right = R * Cb.col(c);
      for (int i = 0; i < grid->size(); ++i) {
        C2 v;
        if (station_of[i] >= 0)
          v = Cb(0, c) * unpack(traj[station_of[i]], 0) + Cb(1, c) * unpack(traj[station_of[i]], 1);
        else if (x[i] - a <= t0 * (1.0 + 1e-9)) {
          const double t = grid->kind(i) == Grid::Map::LogLeft ? grid->dist(i) : x[i] - a;
          v = Cb(0, c) * SL.eval(0, t) + Cb(1, c) * SL.eval(1, t);
        } else {
          const double t = grid->kind(i) == Grid::Map::LogRight ? grid->dist(i) : b - x[i];
          v = right(0) * SR.eval(0, t) + right(1) * SR.eval(1, t);
        }
        u(i) = v(0);
        w(i) = v(1);
      }
      E.u.push_back({grid, u});
      E.w.push_back({grid, w});
      E.agerm(0, c) = Cb(1, c);
      E.agerm(1, c) = right(1);
    }
  }
  E.gram.resize(E.d, E.d);
  for (int r = 0; r < E.d; ++r)
    for (int c = 0; c < E.d; ++c) E.gram(r, c) = l2_inner(E.u[c], E.u[r]) + l2_inner(E.w[c], E.w[r]);
  Eigen::LLT<Mat> llt(E.gram);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::QuadratureFailure, "Gram matrix is not positive definite");
  E.metric = llt.matrixL().adjoint();
  return E;
}

// ---------------------------------------------------------------- indices

IndexData indices(const ConeOperator1D& op, std::optional<cplx> probe) {
  const int d = static_cast<int>(op.singular_sides().size());
  const ConeOperator1D adj = op.formal_adjoint();
  const cplx p0 = op.p_at(op.is_half_line() ? 0.0 : 0.5 * (op.a() + op.b()));
  std::vector<cplx> probes;
  if (probe)
    probes = {*probe};
  else if (op.is_half_line())
    probes = {kI * p0, cplx(1.0, 1.0) * p0, cplx(-1.0, 2.0) * p0};
  else
    probes = {kI, -kI, cplx(1.0, 2.0), cplx(-1.0, 0.5), 0.3};
  for (cplx lambda : probes) {
    try {
      IndexData out;
      out.d = d;
      out.probe = lambda;
      out.d_prime = kernel_in_domain(op, lambda) ? 1 : 0;
      out.d_dprime = kernel_in_domain(adj, std::conj(lambda)) ? 1 : 0;
      if (op.is_half_line() && std::abs((lambda / op.p_at(0.0)).imag()) <= 1e-14 * std::abs(lambda)) continue;
      if (out.d_prime > 0 && kernel_germs(op, lambda).norm() == 0.0) continue;
      if (out.d_prime + out.d_dprime != d) continue;
      return out;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::AmbiguousMembership) throw;
    }
  }
  throw Error(ErrorKind::NoBackgroundResolventFound, fmt::format("{} probes exhausted", probes.size()));
}

std::vector<IndexData> sector_indices(const ConeOperator1D& op) {
  if (!op.is_half_line()) return {indices(op)};
  const cplx p = op.p_at(0.0);
  return {indices(op, kI * p), indices(op, -kI * p)};
}

DomainSpec domain_from_alpha(cplx alpha_minus, cplx alpha_plus) {
  Mat v(2, 1);
  v << alpha_plus, -alpha_minus;
  return {orthonormalize(v), fmt::format("alpha=({},{})", alpha_minus.real(), alpha_plus.real())};
}

DomainSpec minimal_domain(int d) { return {Subspace::zero(d), "min"}; }
DomainSpec maximal_domain(int d) { return {Subspace::full(d), "max"}; }

// ---------------------------------------------------------------- solves

namespace {

struct Particular {
  Vec u;
  Vec germ;
};

// u = h v with v' = i f / (p h): anchored at the left end (germ 0 there) or, on
// the half-line, at infinity.
Particular particular(const ConeOperator1D& op, const KernelSample& k, const Vec& fv, bool from_left) {
  const auto& g = *k.grid;
  const auto& x = g.x();
  const int n = g.size();
  Vec phi(n);
  for (int i = 0; i < n; ++i) phi(i) = kI * fv(i) / (op.p_at(x[i]) * k.h(i));
  // Leading-order tail over [e, first node], from h ~ Z t^{i sigma0}.
  auto tail = [&](Side s, int node) {
    const double t = std::abs(x[node] - op.endpoint(s));
    const cplx s0 = k.sigma0[s == Side::Left ? 0 : 1];
    const cplx z = k.Z(s == Side::Left ? 0 : 1);
    return kI * fv(node) / (op.p_at(op.endpoint(s)) * z) * std::exp((1.0 - kI * s0) * std::log(t)) / (1.0 - kI * s0);
  };
  const cplx tailL = tail(Side::Left, 0);
  Particular P;
  const int d = static_cast<int>(k.Z.size());
  P.germ = Vec::Zero(d);
  Vec v;
  if (from_left) {
    v = g.cumulative(phi).array() + tailL;
    if (!op.is_half_line()) P.germ(1) = k.Z(1) * (v(n - 1) + tail(Side::Right, n - 1));
  } else {
    v = -g.cumulative_from_right(phi);
    P.germ(0) = k.Z(0) * (v(0) - tailL);
  }
  P.u = k.h.cwiseProduct(v);
  return P;
}

struct Setup {
  std::shared_ptr<const Grid> grid;
  KernelSample k;
  Vec f;
  bool from_left;
};

Setup setup(const ConeOperator1D& op, cplx lambda, const Rhs& f, const SolveOptions& opt) {
  Setup S;
  const double x_max = op.is_half_line() ? (opt.x_max > 0 ? opt.x_max : default_x_max(op, lambda)) : 0.0;
  S.grid = grid_for(op, lambda, opt.bandwidth, x_max);
  S.k = sample_kernel(op, lambda, S.grid);
  if (op.is_half_line() && std::abs((lambda / op.p_at(0.0)).imag()) <= 1e-14 * std::abs(lambda))
    throw Error(ErrorKind::SingularSystem, "lambda lies in the background spectrum");
  S.f = S.grid->sample(f);
  S.from_left = !op.is_half_line() || S.k.in_domain;
  return S;
}

struct BmaxResult {
  Vec u;
  Vec germ;
};

BmaxResult bmax(const ConeOperator1D& op, cplx lambda, const Setup& S) {
  Particular P = particular(op, S.k, S.f, S.from_left);
  if (!S.k.in_domain) return {P.u, P.germ};
  // Remove the (.,.)_A component along h, using A h = lambda h and A u_p = f + lambda u_p.
  const auto& g = *S.grid;
  const Vec& h = S.k.h;
  const Vec Au = S.f + lambda * P.u;
  const cplx num = g.integrate(Au.cwiseProduct((lambda * h).conjugate())) + g.integrate(P.u.cwiseProduct(h.conjugate()));
  const cplx den = (1.0 + std::norm(lambda)) * g.integrate(h.cwiseAbs2().cast<cplx>());
  const cplx c = num / den;
  return {P.u - c * h, P.germ - c * S.k.Z};
}

// B_min = B'_min pi_R, with R^perp = ker(A* - conj(lambda)) in D_max(A*).
Vec bmin(const ConeOperator1D& op, cplx lambda, const Setup& S, const Vec& r) {
  const auto& g = *S.grid;
  const KernelSample ks = sample_kernel(op.formal_adjoint(), std::conj(lambda), S.grid);
  Vec rR = r;
  if (ks.in_domain) {
    const cplx num = g.integrate(r.cwiseProduct(ks.h.conjugate()));
    const cplx den = g.integrate(ks.h.cwiseAbs2().cast<cplx>());
    rR -= (num / den) * ks.h;
  }
  return particular(op, S.k, rR, S.from_left).u;
}

void require_index_zero(int d, int d_prime, const DomainSpec& D) {
  if (D.W.ambient_dim() != d)
    throw Error(ErrorKind::DimensionMismatch, fmt::format("domain lives in C^{}, E_max has dimension {}", D.W.ambient_dim(), d));
  if (D.W.dim() + d_prime != d)
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("dim W = {} but d - d' = {}", D.W.dim(), d - d_prime));
}

}  // namespace

SampledFunction solve_bvp(const ConeOperator1D& op, const DomainSpec& D, cplx lambda, const Rhs& f,
                          const SolveOptions& opt) {
  const Setup S = setup(op, lambda, f, opt);
  const int d = static_cast<int>(S.k.Z.size());
  const int dp = S.k.in_domain ? 1 : 0;
  require_index_zero(d, dp, D);
  Particular P = particular(op, S.k, S.f, S.from_left);
  Vec u = P.u;
  if (d > 0) {
    // germ(u_p) + c Zn - W mu = 0.
    Mat M(d, d);
    const double zn = S.k.Z.norm();
    if (dp) M.col(0) = S.k.Z / zn;
    if (D.W.dim() > 0) M.rightCols(D.W.dim()) = -D.W.frame();
    const double det = std::abs(M.determinant());
    if (det < 1e-12)
      throw Error(ErrorKind::SingularSystem, fmt::format("|det[Z|W]| = {:.3e} at lambda = {}{:+}i", det, lambda.real(), lambda.imag()));
    Vec sol = M.partialPivLu().solve(-P.germ);
    if (dp) u += (sol(0) / zn) * S.k.h;
  }
  return {S.grid, u};
}

SampledFunction apply_bmax(const ConeOperator1D& op, cplx lambda, const Rhs& f, const SolveOptions& opt) {
  const Setup S = setup(op, lambda, f, opt);
  return {S.grid, bmax(op, lambda, S).u};
}

SampledFunction apply_bmin(const ConeOperator1D& op, cplx lambda, const Rhs& f, const SolveOptions& opt) {
  const Setup S = setup(op, lambda, f, opt);
  return {S.grid, bmin(op, lambda, S, S.f)};
}

SampledFunction assemble_resolvent(const ConeOperator1D& op, const EmaxBasis& E, const DomainSpec& D, cplx lambda,
                                   const Rhs& f, const SolveOptions& opt) {
  const Setup S = setup(op, lambda, f, opt);
  const int d = E.d;
  const int dp = S.k.in_domain ? 1 : 0;
  require_index_zero(d, dp, D);
  const auto& g = *S.grid;
  const BmaxResult B = bmax(op, lambda, S);
  if (dp == 0) return {S.grid, B.u};

  // Finite-dimensional middle factor: projection on span Z along W, in germ coordinates.
  const ObliqueProjection Pi = oblique_projection(orthonormalize(S.k.Z), D.W);
  const Vec c = Pi.matrix * B.germ;
  Vec e = Vec::Zero(g.size()), Ae = Vec::Zero(g.size());
  for (int i = 0; i < d; ++i) {
    if (c(i) == cplx{}) continue;
    e += c(i) * g.sample([&](double x) { return E.u[i](x); });
    Ae += c(i) * g.sample([&](double x) { return E.w[i](x); });
  }
  const Vec r = Ae - lambda * e;

  const Vec Bmin = bmin(op, lambda, S, r);
  return {S.grid, B.u - (e - Bmin)};
}

}  // namespace cs
