#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conespectra/exppoly.hpp"
#include "conespectra/flow.hpp"
#include "conespectra/grassmann.hpp"
#include "conespectra/mellin.hpp"
#include "conespectra/panels.hpp"

namespace cs {

enum class Side { Left, Right };
std::string to_string(Side s);

/// First-order cone operator A = xt^{-1} (p xt D_x + q) with D_x = -i d/dx, acting
/// in L^2(dx). On an interval xt = (b - x)(x - a); on the half-line xt = x and the
/// coefficients are constant (model operators).
class ConeOperator1D {
 public:
  static ConeOperator1D interval(double a, double b, ExpPoly p, ExpPoly q = {});
  static ConeOperator1D half_line(cplx p, cplx q = 0.0);

  int order() const { return 1; }
  bool is_half_line() const { return half_line_; }
  double a() const { return a_; }
  double b() const { return b_; }
  const ExpPoly& p() const { return p_; }
  const ExpPoly& q() const { return q_; }
  /// Endpoint chart radius: b - a on an interval, 1 on the half-line.
  double chart_radius() const { return half_line_ ? 1.0 : b_ - a_; }
  std::vector<Side> singular_sides() const;
  double endpoint(Side s) const { return s == Side::Left ? a_ : b_; }

  ExpPoly boundary_function() const;
  ConeOperator1D formal_adjoint() const;

  /// Local Taylor data at an endpoint in t = |x - e|, n terms: s [t^j](p l) and [t^j] q,
  /// with s = +1 (left) / -1 (right) and l(t) = L - t (interval) or 1 (half-line).
  std::vector<cplx> taylor_lead(Side s, int n) const;
  std::vector<cplx> taylor_q(Side s, int n) const;

  /// Indicial root -q0 / (s p0 l0). Throws UnsupportedOperator outside |Im| < 1/2.
  cplx indicial_root(Side s) const;

  cplx p_at(double x) const { return p_(x); }
  cplx potential(double x) const;  // q / xt
  /// Apply A to values and derivatives at x.
  cplx apply(double x, cplx u, cplx du) const { return -kI * p_at(x) * du + potential(x) * u; }

  /// Symmetric on D_min: p real and q* = q, checked on samples.
  bool is_symmetric(double tol = 1e-12) const;

 private:
  bool half_line_ = false;
  double a_ = 0.0, b_ = 1.0;
  ExpPoly p_, q_;
};

/// Conormal symbols P^_0 .. P^_{count-1} at an endpoint, for the expansion
/// P = sum_k P_k(x D_x) x^k in the local coordinate.
std::vector<MatrixPolynomial> conormal_symbols(const ConeOperator1D& op, Side s, int count = 1);

/// Frozen half-line operator at an endpoint.
ConeOperator1D wedge_model(const ConeOperator1D& op, Side s);

/// Values of a function on a grid.
struct SampledFunction {
  std::shared_ptr<const Grid> grid;
  Vec values;

  cplx operator()(double x) const { return grid->interpolate(values, x); }
  double l2_norm() const;
};

/// Basis of the kernel of A_max - lambda with exact germ coordinates.
struct KernelFrame {
  cplx lambda;
  std::vector<SampledFunction> functions;
  Mat Z;                    // d x d'
  std::vector<bool> dmin_flag;
  double residual = 0.0;    // relative L2 residual of (A - lambda) u
  int d_prime() const { return static_cast<int>(Z.cols()); }
};

struct FrameOptions {
  double bandwidth = 0.0;  // extra resolution demand (e.g. from a right-hand side)
  double x_max = 0.0;      // half-line truncation; 0 picks one from the decay rate
};

KernelFrame kernel_frame(const ConeOperator1D& op, cplx lambda, const FrameOptions& opt = {});

/// Germ coordinates of the kernel only, holomorphic in lambda, normalized so the
/// left germ is 1. Empty when the kernel is trivial.
Vec kernel_germs(const ConeOperator1D& op, cplx lambda);

/// Whether the half-line kernel at lambda lies in D_max; throws AmbiguousMembership
/// near the threshold. Always true on an interval.
bool kernel_in_domain(const ConeOperator1D& op, cplx lambda);

/// E_max = ker(A*A + I) in D_max, with unit-germ basis and (.,.)_A Gram matrix.
struct EmaxBasis {
  int d = 0;
  std::vector<Side> sides;
  std::vector<cplx> sigma;
  std::vector<SingularFunction> reps;
  std::vector<SampledFunction> u;  // e_i
  std::vector<SampledFunction> w;  // A e_i
  Mat gram;                        // gram(r, c) = (e_c, e_r)_A
  Mat agerm;                       // adjoint-side germs of A e_c
  Mat metric;                      // L^H with gram = L L^H
  std::optional<FlowGenerator> kappa_gen;
  std::shared_ptr<const Grid> grid;

  /// Coordinates in which (.,.)_A is the Euclidean inner product.
  Mat to_metric(const Mat& germs) const { return metric * germs; }
  Mat from_metric(const Mat& y) const;
};

EmaxBasis emax_basis(const ConeOperator1D& op);

struct IndexData {
  int d = 0, d_prime = 0, d_dprime = 0;
  cplx probe;
  int index_min() const { return -d_dprime; }
  int index_max() const { return d_prime; }
};

/// Indices at the first background-resolvent probe (or at `probe` if given).
IndexData indices(const ConeOperator1D& op, std::optional<cplx> probe = {});
/// Half-line: indices in the sectors Im(lambda / p) > 0 and < 0.
std::vector<IndexData> sector_indices(const ConeOperator1D& op);

/// A domain D_min + (span W) in E_max germ coordinates.
struct DomainSpec {
  enum class Origin { User, KappaPulled, DLambda };
  Subspace W;
  std::string label;
  Origin origin = Origin::User;
  cplx origin_value{};  // rho for KappaPulled, lambda for DLambda
};

/// { alpha_- u(a) + alpha_+ u(b) = 0 } in germ coordinates.
DomainSpec domain_from_alpha(cplx alpha_minus, cplx alpha_plus);
DomainSpec minimal_domain(int d);
DomainSpec maximal_domain(int d);

using Rhs = std::function<cplx(double)>;

struct SolveOptions {
  double bandwidth = 0.0;  // of f
  double x_max = 0.0;      // half-line truncation; 0 picks one
};

/// Direct solve of (A - lambda) u = f, u in D.
SampledFunction solve_bvp(const ConeOperator1D& op, const DomainSpec& D, cplx lambda, const Rhs& f,
                          const SolveOptions& opt = {});

/// B_max(lambda) f, the minimal-norm right inverse of A_max - lambda.
SampledFunction apply_bmax(const ConeOperator1D& op, cplx lambda, const Rhs& f, const SolveOptions& opt = {});

/// B_min(lambda) f = B'_min pi_R f, a left inverse of A_min - lambda.
SampledFunction apply_bmin(const ConeOperator1D& op, cplx lambda, const Rhs& f, const SolveOptions& opt = {});

/// Resolvent through the E_max reduction:
/// u = B_max f - (I - B_min (A - lambda)) pi_max pi_{K, D} pi_max B_max f.
SampledFunction assemble_resolvent(const ConeOperator1D& op, const EmaxBasis& E, const DomainSpec& D, cplx lambda,
                                   const Rhs& f, const SolveOptions& opt = {});

/// (kappa_rho u)(x) = rho^{1/2} u(rho x).
Rhs kappa(double rho, Rhs u);
Rhs as_rhs(const SampledFunction& u);

/// Graph inner product (u, v)_A = (Au, Av) + (u, v) on a common grid, with A
/// applied by spectral differentiation.
cplx graph_inner(const ConeOperator1D& op, const SampledFunction& u, const SampledFunction& v);
SampledFunction apply_operator(const ConeOperator1D& op, const SampledFunction& u);
cplx l2_inner(const SampledFunction& u, const SampledFunction& v);

/// Nodes closer than this fraction of the chart radius to an endpoint are left out
/// of residuals.
inline constexpr double kResidualInner = 1e-6;

/// ||(A - lambda) u - f|| relative to the L2 size of the terms and of u.
double operator_residual(const ConeOperator1D& op, cplx lambda, const SampledFunction& u, const Rhs& f = {});

}  // namespace cs
