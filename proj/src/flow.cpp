#include "conespectra/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace cs {

FlowGenerator::FlowGenerator(Mat T) : T_(std::move(T)) {
  if (T_.rows() != T_.cols()) throw Error(ErrorKind::DimensionMismatch, "generator must be square");
}

Mat FlowGenerator::exp(cplx zeta) const {
  if (dim() == 0) return Mat(0, 0);
  Mat A = zeta * T_;
  return A.exp();
}

Subspace flow_act(const FlowGenerator& gen, cplx zeta, const Subspace& V) {
  if (gen.dim() != V.ambient_dim())
    throw Error(ErrorKind::DimensionMismatch, "generator and subspace dimensions differ");
  if (V.dim() == 0) return V;
  return orthonormalize(gen.exp(zeta) * V.frame());
}

bool is_kappa_invariant(const FlowGenerator& gen, const Subspace& V, double tol) {
  if (gen.dim() != V.ambient_dim())
    throw Error(ErrorKind::DimensionMismatch, "generator and subspace dimensions differ");
  if (V.dim() == 0 || V.dim() == V.ambient_dim()) return true;
  Mat TV = gen.T() * V.frame();
  Mat out = TV - V.frame() * (V.frame().adjoint() * TV);
  return out.norm() < tol;
}

OrbitSamples delta_along_orbit(const FlowGenerator& gen, const Subspace& K, const Subspace& W,
                               const std::vector<double>& xi_grid, OrbitDirection direction) {
  if (K.dim() + W.dim() != K.ambient_dim() || K.ambient_dim() != W.ambient_dim())
    throw Error(ErrorKind::DimensionMismatch, "K and W are not complementary");
  OrbitSamples out;
  out.subject = direction == OrbitDirection::PushK ? "delta(exp(xi T) K, W)" : "delta(K, exp(-xi T) W)";
  out.xi = xi_grid;
  out.values.reserve(xi_grid.size());
  for (double xi : xi_grid) {
    if (direction == OrbitDirection::PushK)
      out.values.push_back(delta(flow_act(gen, xi, K), W));
    else
      out.values.push_back(delta(K, flow_act(gen, -xi, W)));
  }
  return out;
}

std::string to_string(OrbitVerdict::Kind k) {
  switch (k) {
    case OrbitVerdict::Kind::BoundedAway: return "BoundedAway";
    case OrbitVerdict::Kind::Vanishing: return "Vanishing";
    case OrbitVerdict::Kind::PeriodicHits: return "PeriodicHits";
    case OrbitVerdict::Kind::Hits: return "Hits";
  }
  return "Unknown";
}

namespace {

// Vertex of the parabola through three points of v^2; near a transversal zero
// v^2 is smooth even though v = |.| has a corner.
double parabola_vertex(double x0, double x1, double x2, double v0, double v1, double v2) {
  const double y0 = v0 * v0, y1 = v1 * v1, y2 = v2 * v2;
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (a <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double b = d01 - a * (x0 + x1);
  return -b / (2.0 * a);
}

}  // namespace

OrbitVerdict detect_orbit_hits(const OrbitSamples& s, double floor) {
  const auto n = s.values.size();
  if (n < 8 || s.xi.size() != n)
    throw Error(ErrorKind::InsufficientSamples, fmt::format("{} samples", n));
  OrbitVerdict out;
  out.infimum = *std::min_element(s.values.begin(), s.values.end());
  if (out.infimum > floor) {
    out.kind = OrbitVerdict::Kind::BoundedAway;
    return out;
  }
  const auto& x = s.xi;
  const auto& v = s.values;
  bool vanishing = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] >= floor) continue;
    const bool left_ok = i == 0 || v[i] < v[i - 1];
    const bool right_ok = i + 1 == n || v[i] <= v[i + 1];
    if (!left_ok || !right_ok) continue;
    const std::size_t c = std::clamp<std::size_t>(i, 1, n - 2);
    const double xv = parabola_vertex(x[c - 1], x[c], x[c + 1], v[c - 1], v[c], v[c + 1]);
    const double h = x[c + 1] - x[c];
    if (i + 1 == n && (!std::isfinite(xv) || xv > x[n - 1] + 0.5 * h)) {
      vanishing = true;
      continue;
    }
    out.hits.push_back(std::isfinite(xv) ? xv : x[i]);
  }
  if (out.hits.size() >= 3) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < out.hits.size(); ++i) gaps.push_back(out.hits[i] - out.hits[i - 1]);
    double mean = 0.0;
    for (double g : gaps) mean += g;
    mean /= double(gaps.size());
    double worst = 0.0;
    for (double g : gaps) worst = std::max(worst, std::abs(g - mean) / mean);
    if (worst <= 0.05) {
      out.kind = OrbitVerdict::Kind::PeriodicHits;
      out.period = mean;
      return out;
    }
  }
  if (vanishing && out.hits.empty()) {
    out.kind = OrbitVerdict::Kind::Vanishing;
    return out;
  }
  out.kind = OrbitVerdict::Kind::Hits;
  return out;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * double(i) / double(n - 1);
  return out;
}

}  // namespace cs
