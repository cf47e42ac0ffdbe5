#include "conespectra/panels.hpp"

#include <algorithm>
#include <cmath>

#include "conespectra/error.hpp"

namespace cs {

namespace {

constexpr int n = Grid::kNodes;

struct Cheb {
  Eigen::VectorXd s;     // nodes on [-1, 1], increasing
  Eigen::MatrixXd cum;   // cumulative integration from -1
  Eigen::MatrixXd diff;  // differentiation
  Eigen::VectorXd bary;

  Cheb() : s(n), cum(n, n), diff(n, n), bary(n) {
    for (int j = 0; j < n; ++j) s(j) = -std::cos(kPi * j / (n - 1));
    Eigen::MatrixXd V(n, n), Q(n, n), Dv(n, n);
    for (int j = 0; j < n; ++j) {
      const double y = s(j);
      std::vector<double> T(n + 1), U(n + 1);
      T[0] = 1.0;
      T[1] = y;
      U[0] = 1.0;
      U[1] = 2.0 * y;
      for (int k = 2; k <= n; ++k) {
        T[k] = 2.0 * y * T[k - 1] - T[k - 2];
        U[k] = 2.0 * y * U[k - 1] - U[k - 2];
      }
      for (int k = 0; k < n; ++k) {
        V(j, k) = T[k];
        Dv(j, k) = k == 0 ? 0.0 : k * U[k - 1];
        const double sign = (k % 2) ? -1.0 : 1.0;  // T_k(-1)
        if (k == 0)
          Q(j, k) = y + 1.0;
        else if (k == 1)
          Q(j, k) = 0.5 * (y * y - 1.0);
        else
          Q(j, k) = 0.5 * (T[k + 1] / (k + 1) - T[k - 1] / (k - 1)) -
                    0.5 * (-sign / (k + 1) - (-sign) / (k - 1));
      }
      bary(j) = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n - 1) ? 0.5 : 1.0);
    }
    Eigen::MatrixXd Vi = V.inverse();
    cum = Q * Vi;
    diff = Dv * Vi;
  }
};

const Cheb& cheb() {
  static const Cheb c;
  return c;
}

double map_x(const Grid::Panel& P, double p) {
  switch (P.map) {
    case Grid::Map::Linear: return p;
    case Grid::Map::LogLeft: return P.e + P.L * std::exp(p);
    case Grid::Map::LogRight: return P.e - P.L * std::exp(-p);
  }
  return p;
}

double map_dx(const Grid::Panel& P, double p) {
  switch (P.map) {
    case Grid::Map::Linear: return 1.0;
    case Grid::Map::LogLeft: return P.L * std::exp(p);
    case Grid::Map::LogRight: return P.L * std::exp(-p);
  }
  return 1.0;
}

}  // namespace

Grid::Grid(std::vector<Panel> ps, bool zero_beyond_hi)
    : panels_(std::move(ps)), zero_beyond_hi_(zero_beyond_hi) {
  if (panels_.empty()) throw Error(ErrorKind::QuadratureFailure, "empty grid");
  const auto& c = cheb();
  for (const auto& P : panels_) {
    const double mid = 0.5 * (P.p0 + P.p1), half = 0.5 * (P.p1 - P.p0);
    for (int j = 0; j < n; ++j) {
      const double p = mid + half * c.s(j);
      x_.push_back(map_x(P, p));
      dxdp_.push_back(map_dx(P, p));
      dist_.push_back(P.map == Map::Linear ? 0.0 : map_dx(P, p));
      kind_.push_back(P.map);
    }
  }
  w_.resize(x_.size());
  for (int k = 0; k < panels(); ++k) {
    const double half = 0.5 * (panels_[k].p1 - panels_[k].p0);
    for (int j = 0; j < n; ++j) w_[k * n + j] = half * c.cum(n - 1, j) * dxdp_[k * n + j];
  }
}

cplx Grid::integrate(const Vec& f) const {
  cplx s{};
  for (int i = 0; i < size(); ++i) s += w_[i] * f(i);
  return s;
}

Vec Grid::cumulative(const Vec& f) const {
  const auto& c = cheb();
  Vec out(size());
  cplx offset{};
  for (int k = 0; k < panels(); ++k) {
    const double half = 0.5 * (panels_[k].p1 - panels_[k].p0);
    Vec g(n);
    for (int j = 0; j < n; ++j) g(j) = f(k * n + j) * dxdp_[k * n + j];
    Vec F = half * (c.cum.cast<cplx>() * g);
    for (int j = 0; j < n; ++j) out(k * n + j) = offset + F(j);
    offset += F(n - 1);
  }
  return out;
}

Vec Grid::cumulative_from_right(const Vec& f) const {
  Vec C = cumulative(f);
  const cplx total = C(size() - 1);
  return Vec::Constant(size(), total) - C;
}

Vec Grid::derivative(const Vec& f) const {
  const auto& c = cheb();
  Vec out(size());
  for (int k = 0; k < panels(); ++k) {
    const double half = 0.5 * (panels_[k].p1 - panels_[k].p0);
    Vec d = c.diff.cast<cplx>() * f.segment(k * n, n);
    for (int j = 0; j < n; ++j) out(k * n + j) = d(j) / (half * dxdp_[k * n + j]);
  }
  return out;
}

double Grid::to_param(const Panel& P, double x) const {
  switch (P.map) {
    case Map::Linear: return x;
    case Map::LogLeft: return std::log((x - P.e) / P.L);
    case Map::LogRight: return -std::log((P.e - x) / P.L);
  }
  return x;
}

cplx Grid::interpolate(const Vec& f, double x) const {
  if (x <= lo()) return f(0);
  if (x >= hi()) return zero_beyond_hi_ ? cplx{} : f(size() - 1);
  // Panel k spans x_[k n] .. x_[k n + n - 1].
  int lo_k = 0, hi_k = panels() - 1;
  while (lo_k < hi_k) {
    const int mid = (lo_k + hi_k) / 2;
    if (x_[mid * n + n - 1] < x)
      lo_k = mid + 1;
    else
      hi_k = mid;
  }
  const int k = lo_k;
  const auto& P = panels_[k];
  const auto& c = cheb();
  const double mid = 0.5 * (P.p0 + P.p1), half = 0.5 * (P.p1 - P.p0);
  const double s = (to_param(P, x) - mid) / half;
  cplx num{};
  double den = 0.0;
  for (int j = 0; j < n; ++j) {
    const double dx = s - c.s(j);
    if (dx == 0.0) return f(k * n + j);
    const double t = c.bary(j) / dx;
    num += t * f(k * n + j);
    den += t;
  }
  return num / den;
}

namespace {

void push_split(std::vector<Grid::Panel>& out, double x0, double x1, double wmax) {
  const int pieces = std::max(1, static_cast<int>(std::ceil((x1 - x0) / wmax)));
  for (int i = 0; i < pieces; ++i)
    out.push_back({x0 + (x1 - x0) * i / pieces, x0 + (x1 - x0) * (i + 1) / pieces});
}

// Log panels covering t in [inner L, seed L] near endpoint e.
void push_log(std::vector<Grid::Panel>& out, double e, double L, bool left) {
  const double p_in = std::log(kInnerFraction), p_out = std::log(kSeedFraction);
  const int pieces = 12;
  std::vector<Grid::Panel> v;
  for (int i = 0; i < pieces; ++i) {
    const double a = p_in + (p_out - p_in) * i / pieces, b = p_in + (p_out - p_in) * (i + 1) / pieces;
    if (left)
      v.push_back({a, b, Grid::Map::LogLeft, e, L});
    else
      v.push_back({-b, -a, Grid::Map::LogRight, e, L});
  }
  if (!left) std::reverse(v.begin(), v.end());
  out.insert(out.end(), v.begin(), v.end());
}

// Breakpoints t0 2^k up to `reach`, measured from the endpoint.
std::vector<double> graded(double L, double reach) {
  std::vector<double> t{kSeedFraction * L};
  while (t.back() * 2.0 < reach) t.push_back(t.back() * 2.0);
  t.push_back(reach);
  return t;
}

}  // namespace

std::shared_ptr<const Grid> make_interval_grid(double a, double b, double bandwidth) {
  const double L = b - a;
  const double wmax = std::min(0.25 * L, 8.0 / (bandwidth + 1.0));
  std::vector<Grid::Panel> P;
  push_log(P, a, L, true);
  const auto t = graded(L, 0.25 * L);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) push_split(P, a + t[i], a + t[i + 1], wmax);
  push_split(P, a + 0.25 * L, b - 0.25 * L, wmax);
  for (std::size_t i = t.size() - 1; i > 0; --i) push_split(P, b - t[i], b - t[i - 1], wmax);
  push_log(P, b, L, false);
  return std::make_shared<const Grid>(std::move(P));
}

std::shared_ptr<const Grid> make_halfline_grid(double x_max, double bandwidth) {
  const double L = 1.0;
  const double wmax = std::min(2.0, 8.0 / (bandwidth + 1.0));
  std::vector<Grid::Panel> P;
  push_log(P, 0.0, L, true);
  const auto t = graded(L, 0.25 * L);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) push_split(P, t[i], t[i + 1], wmax);
  push_split(P, 0.25 * L, x_max, wmax);
  return std::make_shared<const Grid>(std::move(P), true);
}

}  // namespace cs
