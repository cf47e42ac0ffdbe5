#include "conespectra/spectra.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include "conespectra/error.hpp"

namespace cs {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  threads = std::clamp(threads, 1, n);
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int block = (n + threads - 1) / threads;
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t * block; i < std::min(n, (t + 1) * block); ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CONESPECTRA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 1;
}

std::string to_string(SpectralVerdict::Kind k) {
  switch (k) {
    case SpectralVerdict::Kind::BgRes: return "BgRes";
    case SpectralVerdict::Kind::BgSpec: return "BgSpec";
    case SpectralVerdict::Kind::EigenvalueOfD: return "EigenvalueOfD";
    case SpectralVerdict::Kind::ResolventPointOfD: return "ResolventPointOfD";
  }
  return "?";
}

std::string to_string(SpectrumScan::Verdict v) {
  return v == SpectrumScan::Verdict::Roots ? "Roots" : "FullRegionInSpectrum";
}

std::string to_string(MinimalGrowthReport::Verdict v) {
  return v == MinimalGrowthReport::Verdict::SectorOfMinimalGrowth ? "SectorOfMinimalGrowth" : "Fails";
}

// ---------------------------------------------------------------- classification

namespace {

int expected_d_prime(const ConeOperator1D& op, cplx lambda, const std::optional<IndexData>& idx) {
  if (op.is_half_line()) return (lambda / op.p_at(0.0)).imag() > 0.0 ? 1 : 0;
  return idx ? idx->d_prime : indices(op).d_prime;
}

}  // namespace

SpectralVerdict bg_classify(const ConeOperator1D& op, cplx lambda, std::optional<IndexData> idx) {
  SpectralVerdict v;
  v.lambda = lambda;
  if (op.is_half_line() && std::abs((lambda / op.p_at(0.0)).imag()) <= 1e-14 * std::abs(lambda / op.p_at(0.0))) {
    v.classification = SpectralVerdict::Kind::BgSpec;
    v.notes = "on the boundary ray of the sector decomposition";
    return v;
  }
  const Vec Z = kernel_germs(op, lambda);
  v.d_prime_at_lambda = static_cast<int>(Z.size() > 0 ? 1 : 0);
  const int want = expected_d_prime(op, lambda, idx);
  if (v.d_prime_at_lambda != want) {
    v.classification = SpectralVerdict::Kind::BgSpec;
    v.notes = fmt::format("dim K = {} but d' = {}", v.d_prime_at_lambda, want);
  } else if (v.d_prime_at_lambda > 0 && Z.norm() == 0.0) {
    v.classification = SpectralVerdict::Kind::BgSpec;
    v.notes = "kernel meets D_min";
  } else {
    v.classification = SpectralVerdict::Kind::BgRes;
  }
  return v;
}

SpectralVerdict classify(const ConeOperator1D& op, const DomainSpec& D, cplx lambda, double tol,
                         std::optional<IndexData> idx) {
  SpectralVerdict v = bg_classify(op, lambda, idx);
  if (v.classification == SpectralVerdict::Kind::BgSpec) return v;
  const Vec Z = kernel_germs(op, lambda);
  const int d = D.W.ambient_dim();
  if (D.W.dim() + static_cast<int>(Z.size() > 0) != d)
    throw Error(ErrorKind::DimensionMismatch, "domain does not have index zero at this lambda");
  const Subspace K = Z.size() > 0 ? orthonormalize(Mat(Z)) : Subspace::zero(d);
  v.delta_value = delta(K, D.W);
  v.classification = v.delta_value <= tol ? SpectralVerdict::Kind::EigenvalueOfD
                                          : SpectralVerdict::Kind::ResolventPointOfD;
  return v;
}

KernelMap kernel_map(const ConeOperator1D& op) {
  const int d = static_cast<int>(op.singular_sides().size());
  return [op, d](cplx lambda) -> Mat {
    const Vec z = kernel_germs(op, lambda);
    if (z.size() == 0) return Mat(d, 0);
    return Mat(z);
  };
}

cplx spectral_determinant(const KernelMap& Z, const Subspace& W, cplx lambda) {
  const Mat z = Z(lambda);
  const int d = W.ambient_dim();
  if (z.rows() != d || z.cols() + W.dim() != d)
    throw Error(ErrorKind::DimensionMismatch, "[Z | W] is not square");
  if (d == 0) return 1.0;
  Mat M(d, d);
  M << z, W.frame();
  return M.determinant();
}

// ---------------------------------------------------------------- scans

namespace {

double normalized(const Mat& z, const Subspace& W) {
  const int d = W.ambient_dim();
  const Subspace K = z.cols() > 0 ? span_of(z) : Subspace::zero(d);
  if (K.dim() != z.cols()) return 0.0;
  return delta(K, W);
}

struct Polished {
  enum class Status { Converged, Flat, Runaway, Failed };
  Status status = Status::Failed;
  cplx root;
};

Polished newton(const KernelMap& Z, const Subspace& W, cplx start) {
  using St = Polished::Status;
  cplx lam = start;
  double first = -1.0, last = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double h = 1e-6 * std::max(1.0, std::abs(lam));
    const cplx F = spectral_determinant(Z, W, lam);
    const cplx dF = (spectral_determinant(Z, W, lam + h) - spectral_determinant(Z, W, lam - h)) / (2.0 * h);
    if (!std::isfinite(std::abs(F)) || !std::isfinite(std::abs(dF))) return {St::Failed, lam};
    if (F == cplx{}) return {St::Converged, lam};
    if (std::abs(dF) * std::max(1.0, std::abs(lam)) <= 1e-12 * std::abs(F)) return {St::Flat, lam};
    cplx step = F / dF;
    // Damp steps longer than the local scale.
    const double cap = 0.5 * std::max(1.0, std::abs(lam));
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    lam -= step;
    last = std::abs(step);
    if (first < 0.0) first = last;
    if (last <= 1e-13 * std::max(1.0, std::abs(lam))) return {St::Converged, lam};
  }
  // Steps that never shrink mean F has no zero nearby (e.g. a pure exponential).
  return {last >= 0.5 * first ? St::Runaway : St::Failed, lam};
}

void add_root(SpectrumScan& out, const KernelMap& Z, const Subspace& W, cplx root, double tol) {
  for (cplx r : out.roots)
    if (std::abs(r - root) <= 1e-7 * std::max(1.0, std::abs(root))) return;
  const double dl = normalized(Z(root), W);
  if (dl > tol) return;
  out.roots.push_back(root);
  out.root_delta.push_back(dl);
}

void sort_roots(SpectrumScan& out) {
  std::vector<int> order(out.roots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(out.roots[a]), mb = std::abs(out.roots[b]);
    if (ma != mb) return ma < mb;
    return std::arg(out.roots[a]) < std::arg(out.roots[b]);
  });
  std::vector<cplx> r;
  std::vector<double> dl;
  for (int i : order) {
    r.push_back(out.roots[i]);
    dl.push_back(out.root_delta[i]);
  }
  out.roots = std::move(r);
  out.root_delta = std::move(dl);
}

// Polish from a local minimum of the normalized determinant. A deep minimum that
// does not converge is an error; shallow ones are just dips.
void polish(SpectrumScan& out, const KernelMap& Z, const Subspace& W, cplx start, double depth, double tol,
            const std::function<bool(cplx)>& inside) {
  const Polished p = newton(Z, W, start);
  if (p.status == Polished::Status::Flat || p.status == Polished::Status::Runaway) return;
  if (p.status == Polished::Status::Failed) {
    if (depth < 1e-4)
      throw Error(ErrorKind::RootPolishDiverged,
                  fmt::format("Newton failed from {}{:+}i (delta {:.2e})", start.real(), start.imag(), depth));
    return;
  }
  if (inside(p.root)) add_root(out, Z, W, p.root, tol);
}

}  // namespace

SpectrumScan spectrum_scan(const KernelMap& Z, const DomainSpec& D, const RayRegion& ray, const ScanOptions& opt) {
  if (ray.samples < 3 || !(ray.r0 > 0.0) || !(ray.r1 > ray.r0))
    throw Error(ErrorKind::InsufficientSamples, "ray needs 0 < r0 < r1 and at least 3 samples");
  const cplx dir = ray.direction / std::abs(ray.direction);
  const int n = ray.samples;
  std::vector<double> r(n), dl(n);
  for (int k = 0; k < n; ++k) r[k] = ray.r0 * std::pow(ray.r1 / ray.r0, double(k) / (n - 1));
  parallel_for(n, opt.threads, [&](int k) { dl[k] = normalized(Z(dir * r[k]), D.W); });
  SpectrumScan out;
  out.samples = n;
  out.max_normalized = *std::max_element(dl.begin(), dl.end());
  if (out.max_normalized < opt.full_region_tol) {
    out.verdict = SpectrumScan::Verdict::FullRegionInSpectrum;
    return out;
  }
  auto inside = [&](cplx lam) {
    const double m = std::abs(lam);
    return m >= ray.r0 * (1 - 1e-9) && m <= ray.r1 * (1 + 1e-9);
  };
  for (int k = 0; k < n; ++k) {
    const bool left = k == 0 || dl[k] < dl[k - 1];
    const bool right = k == n - 1 || dl[k] <= dl[k + 1];
    if (left && right) polish(out, Z, D.W, dir * r[k], dl[k], opt.root_tol, inside);
  }
  sort_roots(out);
  return out;
}

SpectrumScan spectrum_scan(const KernelMap& Z, const DomainSpec& D, const RectRegion& rect, const ScanOptions& opt) {
  if (rect.nx < 2 || rect.ny < 2) throw Error(ErrorKind::InsufficientSamples, "rectangle needs at least 2x2 samples");
  const int nx = rect.nx, ny = rect.ny;
  auto point = [&](int i, int j) {
    return cplx(rect.lo.real() + (rect.hi.real() - rect.lo.real()) * i / (nx - 1),
                rect.lo.imag() + (rect.hi.imag() - rect.lo.imag()) * j / (ny - 1));
  };
  std::vector<double> dl(nx * ny);
  parallel_for(nx * ny, opt.threads, [&](int k) { dl[k] = normalized(Z(point(k % nx, k / nx)), D.W); });
  SpectrumScan out;
  out.samples = nx * ny;
  out.max_normalized = *std::max_element(dl.begin(), dl.end());
  if (out.max_normalized < opt.full_region_tol) {
    out.verdict = SpectrumScan::Verdict::FullRegionInSpectrum;
    return out;
  }
  const double sx = (rect.hi.real() - rect.lo.real()) / (nx - 1), sy = (rect.hi.imag() - rect.lo.imag()) / (ny - 1);
  auto inside = [&](cplx lam) {
    return lam.real() >= rect.lo.real() - 1e-9 * sx && lam.real() <= rect.hi.real() + 1e-9 * sx &&
           lam.imag() >= rect.lo.imag() - 1e-9 * sy && lam.imag() <= rect.hi.imag() + 1e-9 * sy;
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double v = dl[j * nx + i];
      bool is_min = true;
      for (int dj = -1; dj <= 1 && is_min; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (!di && !dj) continue;
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
          const double w = dl[b * nx + a];
          // Ties break toward the lower index so a flat pair yields one start.
          if (w < v || (w == v && b * nx + a < j * nx + i)) {
            is_min = false;
            break;
          }
        }
      if (is_min) polish(out, Z, D.W, point(i, j), v, opt.root_tol, inside);
    }
  }
  sort_roots(out);
  return out;
}

// ---------------------------------------------------------------- projections

EigenProjection eigen_projection(const Mat& Z, const DomainSpec& D, const Mat& metric, double tol) {
  const int d = D.W.ambient_dim();
  const Subspace K = Z.cols() > 0 ? orthonormalize(Z) : Subspace::zero(d);
  if (K.dim() + D.W.dim() != d) throw Error(ErrorKind::DimensionMismatch, "kernel and domain are not complementary");
  const ObliqueProjection P = oblique_projection(K, D.W, tol);
  EigenProjection out;
  out.matrix = P.matrix;
  out.euclidean_norm = P.norm;
  if (d == 0) return out;
  const Mat Pm = metric * P.matrix * metric.partialPivLu().inverse();
  out.norm = Eigen::JacobiSVD<Mat>(Pm).singularValues()(0);
  const RVec s = Eigen::JacobiSVD<Mat>(metric).singularValues();
  out.gram_condition = std::pow(s(0) / s(d - 1), 2);
  return out;
}

namespace {

// Golden-section search to full precision; delta has V-shaped zeros, where
// parabolic steps (and Boost's half-mantissa Brent) stall around 1e-8.
std::pair<double, double> golden_min(const std::function<double(double)>& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 4e-16 * std::max(1.0, std::abs(a)); ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = f(d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

// Sampled minima of delta are refined and inserted, so isolated zeros between grid
// points are seen.
void refine_minima(OrbitSamples& s, const std::function<double(double)>& f) {
  const int n = static_cast<int>(s.xi.size());
  std::vector<std::pair<double, double>> extra;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(s.values[i] <= s.values[i - 1] && s.values[i] <= s.values[i + 1])) continue;
    const auto [x, v] = golden_min(f, s.xi[i - 1], s.xi[i + 1]);
    if (v < s.values[i]) extra.emplace_back(x, v);
  }
  for (auto [x, v] : extra) {
    const auto it = std::lower_bound(s.xi.begin(), s.xi.end(), x);
    const auto k = it - s.xi.begin();
    if (it != s.xi.end() && *it == x) {
      s.values[k] = std::min(s.values[k], v);
      continue;
    }
    s.xi.insert(it, x);
    s.values.insert(s.values.begin() + k, v);
  }
}

}  // namespace

MinimalGrowthReport minimal_growth_check(const FlowGenerator& gen, const Mat& metric, const Subspace& K_hat,
                                         const DomainSpec& D, cplx lambda_hat, const std::vector<double>& xi_grid,
                                         double floor) {
  const int d = gen.dim();
  if (K_hat.ambient_dim() != d || D.W.ambient_dim() != d || K_hat.dim() + D.W.dim() != d)
    throw Error(ErrorKind::DimensionMismatch, "kernel and domain must be complementary in E_max");
  MinimalGrowthReport rep;
  rep.lambda_hat = lambda_hat;
  rep.delta_samples.subject = "delta";
  rep.norm_samples.subject = "proj_norm";
  auto norm_at = [&](const Subspace& W) {
    try {
      return eigen_projection(K_hat.frame(), DomainSpec{W, D.label}, metric, 0.0).norm;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  if (K_hat.dim() == 0) {
    // pi_{K, D} = 0: resolvent is B_min-like along the whole sector.
    rep.delta_samples.xi = rep.norm_samples.xi = xi_grid;
    rep.delta_samples.values.assign(xi_grid.size(), 1.0);
    rep.norm_samples.values.assign(xi_grid.size(), 0.0);
    rep.verdict = MinimalGrowthReport::Verdict::SectorOfMinimalGrowth;
    rep.bound = 0.0;
    rep.reason = "trivial kernel";
    return rep;
  }
  if (is_kappa_invariant(gen, D.W)) {
    const double dl = delta(K_hat, D.W);
    rep.delta_samples.xi = rep.norm_samples.xi = {0.0};
    rep.delta_samples.values = {dl};
    rep.norm_samples.values = {dl > floor ? norm_at(D.W) : std::numeric_limits<double>::infinity()};
    if (dl > floor) {
      rep.verdict = MinimalGrowthReport::Verdict::SectorOfMinimalGrowth;
      rep.bound = rep.norm_samples.values[0];
      rep.reason = "invariant domain";
    } else {
      rep.verdict = MinimalGrowthReport::Verdict::Fails;
      rep.reason = "InvariantObstruction";
    }
    return rep;
  }
  rep.delta_samples = delta_along_orbit(gen, K_hat, D.W, xi_grid, OrbitDirection::PullW);
  rep.delta_samples.subject = "delta";
  refine_minima(rep.delta_samples, [&](double xi) { return delta(K_hat, flow_act(gen, -xi, D.W)); });
  rep.norm_samples.xi = rep.delta_samples.xi;
  rep.norm_samples.values.resize(rep.norm_samples.xi.size());
  for (std::size_t i = 0; i < rep.norm_samples.xi.size(); ++i)
    rep.norm_samples.values[i] = rep.delta_samples.values[i] > floor
                                     ? norm_at(flow_act(gen, -rep.norm_samples.xi[i], D.W))
                                     : std::numeric_limits<double>::infinity();
  const OrbitVerdict ov = detect_orbit_hits(rep.delta_samples, floor);
  if (ov.kind == OrbitVerdict::Kind::BoundedAway) {
    rep.verdict = MinimalGrowthReport::Verdict::SectorOfMinimalGrowth;
    rep.bound = *std::max_element(rep.norm_samples.values.begin(), rep.norm_samples.values.end());
  } else {
    rep.verdict = MinimalGrowthReport::Verdict::Fails;
    rep.reason = to_string(ov.kind);
  }
  return rep;
}

MinimalGrowthReport minimal_growth_check(const ConeOperator1D& model, const EmaxBasis& E, const DomainSpec& D,
                                         cplx lambda_hat, const std::vector<double>& xi_grid, double floor) {
  if (!model.is_half_line() || !E.kappa_gen)
    throw Error(ErrorKind::UnsupportedOperator, "minimal growth check needs a half-line model operator");
  const Vec z = kernel_germs(model, lambda_hat);
  const Subspace K = z.size() > 0 ? orthonormalize(Mat(z)) : Subspace::zero(E.d);
  return minimal_growth_check(*E.kappa_gen, E.metric, K, D, lambda_hat, xi_grid, floor);
}

// ---------------------------------------------------------------- pairing

PairingMatrix dirichlet_pairing_matrix(const ConeOperator1D& op, const EmaxBasis& E, const EmaxBasis& Estar) {
  if (E.d != Estar.d) throw Error(ErrorKind::DimensionMismatch, "E_max(A) and E_max(A*) differ in dimension");
  const int d = E.d;
  PairingMatrix out;
  out.P = Mat::Zero(d, d);
  // Unit germ bases: e_i and f_i carry germ 1 at endpoint i only, and p u conj(v)
  // tends to p(e) times the product of germs.
  for (int i = 0; i < d; ++i) {
    const double sg = E.sides[i] == Side::Left ? -1.0 : 1.0;
    out.P(i, i) = -kI * sg * op.p_at(op.endpoint(E.sides[i]));
  }
  // Cross-check against (Au, v) - (u, A* v) by quadrature on the grid of E.
  const auto& g = E.grid;
  double worst = 0.0;
  for (int r = 0; r < d; ++r) {
    SampledFunction f{g, g->sample([&](double x) { return Estar.u[r](x); })};
    SampledFunction Af{g, g->sample([&](double x) { return Estar.w[r](x); })};
    for (int c = 0; c < d; ++c) {
      const cplx q = l2_inner(E.w[c], f) - l2_inner(E.u[c], Af);
      worst = std::max(worst, std::abs(q - out.P(r, c)));
    }
  }
  out.quadrature_mismatch = worst;
  if (worst > 1e-6 * std::max(1.0, out.P.norm()))
    throw Error(ErrorKind::QuadratureFailure, fmt::format("pairing quadrature mismatch {:.3e}", worst));
  if (d > 0) {
    const RVec s = Eigen::JacobiSVD<Mat>(out.P).singularValues();
    if (s(d - 1) <= 1e-12 * s(0)) throw Error(ErrorKind::SingularPairing, "Dirichlet pairing is singular");
    out.condition = s(0) / s(d - 1);
  }
  return out;
}

namespace {

Subspace annihilator(const Mat& M, const Subspace& W) {
  const int d = W.ambient_dim();
  if (W.dim() == 0) return Subspace::full(d);
  return span_of(M * W.frame()).complement();
}

}  // namespace

DomainSpec adjoint_domain(const PairingMatrix& pm, const DomainSpec& D) {
  if (pm.P.rows() != D.W.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "pairing and domain differ");
  return {annihilator(pm.P, D.W), "adjoint of " + D.label};
}

DomainSpec preadjoint_domain(const PairingMatrix& pm, const DomainSpec& Dstar) {
  if (pm.P.rows() != Dstar.W.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "pairing and domain differ");
  return {annihilator(pm.P.adjoint(), Dstar.W), "preadjoint of " + Dstar.label};
}

// ---------------------------------------------------------------- selfadjoint tools

namespace {

ConeOperator1D require_symmetric(const ConeOperator1D& op) {
  if (!op.is_symmetric()) throw Error(ErrorKind::NotSymmetric, "operator is not symmetric on D_min");
  return op;
}

}  // namespace

SelfAdjointTools::SelfAdjointTools(const ConeOperator1D& op)
    : op_(require_symmetric(op)), E_(emax_basis(op_)), pm_(dirichlet_pairing_matrix(op_, E_, E_)), chart_(Mat(0, 0), Mat(0, 0)) {
  if ((pm_.P + pm_.P.adjoint()).norm() > 1e-10 * std::max(1.0, pm_.P.norm()))
    throw Error(ErrorKind::NotSymmetric, "pairing is not skew-Hermitian");
  const IndexData idx = indices(op_);
  if (idx.d_prime != idx.d_dprime) return;  // no selfadjoint extensions
  for (double lam : {0.0, 0.5, -0.75, 1.3, 2.1}) {
    try {
      const DomainSpec base = d_lambda(lam);
      if (!is_selfadjoint(base)) continue;
      // (.,.)_A-orthonormal frame of the base point, and its image under A.
      const Mat y = E_.to_metric(base.W.frame());
      const Mat phi1 = E_.from_metric(orthonormalize(y).frame());
      chart_ = Chart(phi1, E_.agerm * phi1);
      return;
    } catch (const Error&) {
    }
  }
}

bool SelfAdjointTools::is_selfadjoint(const DomainSpec& D, double tol) const {
  const DomainSpec J = adjoint_domain(pm_, D);
  if (J.W.dim() != D.W.dim()) return false;
  if (D.W.dim() == 0) return true;
  const auto ang = principal_angles(J.W, D.W);
  return ang.back() <= tol;
}

DomainSpec SelfAdjointTools::d_lambda(double lambda) const {
  const Vec z = kernel_germs(op_, lambda);
  const int dp = indices(op_).d_prime;
  const Subspace K = z.size() > 0 ? span_of(Mat(z)) : Subspace::zero(E_.d);
  if (K.dim() != dp || dp == 0)
    throw Error(ErrorKind::DegenerateKernel, fmt::format("kernel germs at {} have rank {} < {}", lambda, K.dim(), dp));
  DomainSpec D{K, fmt::format("D_lambda({})", lambda), DomainSpec::Origin::DLambda, lambda};
  return D;
}

double SelfAdjointTools::chart_constraint(const DomainSpec& D) const {
  if (chart_.k() == 0 && E_.d > 0) throw Error(ErrorKind::DegenerateKernel, "no selfadjoint base point");
  const Mat Z = chart_coords(chart_, D.W);
  const double zn = Z.norm();
  return (Z - Z.adjoint()).norm() / (1.0 + zn * zn);
}

// ---------------------------------------------------------------- resolvent norms

std::vector<ResolventRaySample> resolvent_norm_along_ray(const ConeOperator1D& op, const DomainSpec& D, cplx direction,
                                                        const std::vector<double>& radii, int probes, int threads) {
  const cplx dir = direction / std::abs(direction);
  // L2-orthonormal probes: cosines on an interval, Laguerre functions on the half-line.
  std::vector<Rhs> f;
  SolveOptions opt;
  if (op.is_half_line()) {
    for (int j = 0; j < probes; ++j)
      f.push_back([j](double x) { return cplx(std::exp(-x / 2.0) * std::laguerre(j, x)); });
    opt.bandwidth = 1.0;
  } else {
    const double a = op.a(), L = op.b() - op.a();
    for (int j = 0; j < probes; ++j)
      f.push_back([=](double x) { return cplx(j == 0 ? std::sqrt(1.0 / L) : std::sqrt(2.0 / L) * std::cos(j * kPi * (x - a) / L)); });
    opt.bandwidth = probes * kPi / L;
  }
  std::vector<ResolventRaySample> out(radii.size());
  parallel_for(static_cast<int>(radii.size()), threads, [&](int k) {
    const cplx lam = dir * radii[k];
    ResolventRaySample s{radii[k], lam, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    try {
      std::vector<SampledFunction> u;
      for (const auto& fj : f) u.push_back(solve_bvp(op, D, lam, fj, opt));
      Mat G(probes, probes);
      for (int i = 0; i < probes; ++i)
        for (int j = 0; j < probes; ++j) G(i, j) = l2_inner(u[j], u[i]);
      Eigen::SelfAdjointEigenSolver<Mat> es(G);
      s.norm = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
      s.scaled = std::abs(lam) * s.norm;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularSystem) throw;
    }
    out[k] = s;
  });
  return out;
}

}  // namespace cs
