#include <gtest/gtest.h>

#include <cmath>

#include "conespectra/cone1d.hpp"
#include "conespectra/error.hpp"
#include "mellin_oracle.hpp"
#include "random_util.hpp"

using namespace cs;

namespace {

ConeOperator1D gkm(double rho) { return ConeOperator1D::interval(-1.0, 1.0, ExpPoly::exponential(1.0, -kI * rho)); }
ConeOperator1D momentum() { return ConeOperator1D::interval(-1.0, 1.0, ExpPoly(1.0)); }

// Closed-form kernel function of e^{-i rho x} D_x - lambda.
cplx h_exact(double rho, cplx lambda, double x) { return std::exp(lambda * std::exp(kI * rho * x) / rho); }

void expect_throw_kind(const std::function<void()>& f, ErrorKind k) {
  try {
    f();
    ADD_FAILURE() << "no error thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), k) << e.what();
  }
}

// Relative L2 distance of two functions on the grid of u.
double rel_l2(const SampledFunction& u, const Rhs& v) {
  SampledFunction diff{u.grid, u.values - u.grid->sample(v)};
  return diff.l2_norm() / std::max(u.l2_norm(), 1e-300);
}

// sin of the angle between two one-dimensional function spans, on the grid of u.
double line_angle(const SampledFunction& u, const Rhs& v) {
  SampledFunction w{u.grid, u.grid->sample(v)};
  SampledFunction r{u.grid, w.values - (l2_inner(w, u) / l2_inner(u, u)) * u.values};
  return r.l2_norm() / w.l2_norm();
}

}  // namespace

TEST(Conormal, LeadingSymbolsOfExample) {
  const double rho = 1.0;
  const auto op = gkm(rho);
  const auto L = conormal_symbols(op, Side::Left)[0].scalar_coeffs();
  const auto R = conormal_symbols(op, Side::Right)[0].scalar_coeffs();
  ASSERT_EQ(L.size(), 2u);
  EXPECT_LT(std::abs(L[0]), 1e-15);
  EXPECT_LT(std::abs(L[1] - 2.0 * std::exp(kI * rho)), 1e-14);
  EXPECT_LT(std::abs(R[0]), 1e-15);
  EXPECT_LT(std::abs(R[1] + 2.0 * std::exp(-kI * rho)), 1e-14);
}

TEST(Conormal, HigherSymbolsMatchContourCoefficients) {
  // P t^{i sigma} = sum_k P^_k(sigma - i k) t^{i sigma + k}, and the coefficient of t^k is
  // the Taylor coefficient of s sigma p(e + s t) l(t) + q(e + s t).
  const auto p = ExpPoly::exponential(1.0, -0.7 * kI) + ExpPoly::monomial(0.3, 2);
  const auto q = ExpPoly::monomial(0.2, 1) + ExpPoly::exponential(0.05, 1.3);
  const auto op = ConeOperator1D::interval(-1.0, 2.0, p, q);
  for (Side side : {Side::Left, Side::Right}) {
    const double s = side == Side::Left ? 1.0 : -1.0, e = op.endpoint(side);
    const auto P = conormal_symbols(op, side, 4);
    for (cplx sigma : {cplx(0.4, 0.1), cplx(-1.2, 0.3)}) {
      auto local = [&](cplx t) { return s * sigma * p(e + s * t.real()) * (3.0 - t.real()) + q(e + s * t.real()); };
      // ExpPoly only evaluates on the real line; use the complex extension explicitly.
      auto local_c = [&](cplx t) {
        const cplx x = e + s * t;
        const cplx pv = std::exp(-0.7 * kI * x) + 0.3 * x * x;
        const cplx qv = 0.2 * x + 0.05 * std::exp(1.3 * x);
        return s * sigma * pv * (3.0 - t) + qv;
      };
      EXPECT_LT(std::abs(local(0.3) - local_c(0.3)), 1e-13);
      for (int k = 0; k < 4; ++k) {
        const cplx want = cs::testing::contour_coefficient(local_c, 0.0, 0.5, k);
        const cplx got = P[k](sigma - kI * double(k))(0, 0);
        EXPECT_LT(std::abs(got - want), 1e-11 * (1.0 + std::abs(want))) << "k=" << k;
      }
    }
  }
}

TEST(WedgeModel, FreezesLeadingCoefficient) {
  const double rho = 1.0;
  const auto op = gkm(rho);
  const auto model = wedge_model(op, Side::Left);
  EXPECT_TRUE(model.is_half_line());
  EXPECT_LT(std::abs(model.p_at(0.0) - 2.0 * std::exp(kI * rho)), 1e-14);
  EXPECT_LT(std::abs(model.p_at(5.0) - 2.0 * std::exp(kI * rho)), 1e-14);
  const auto a = conormal_symbols(op, Side::Left)[0].scalar_coeffs();
  const auto b = conormal_symbols(model, Side::Left)[0].scalar_coeffs();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);

  const auto h = ConeOperator1D::half_line(cplx(1.0, 2.0), cplx(0.1, 0.05));
  const auto hm = wedge_model(h, Side::Left);
  EXPECT_EQ(hm.p_at(1.0), h.p_at(1.0));
  EXPECT_EQ(hm.q()(1.0), h.q()(1.0));
}

TEST(KernelFrame, MatchesClosedFormOnExample) {
  for (double rho : {1.0, 2.5}) {
    for (cplx lambda : {cplx(3.0, 0.7), cplx(-1.5, -2.0), cplx(0.0, 6.0)}) {
      const auto K = kernel_frame(gkm(rho), lambda);
      ASSERT_EQ(K.d_prime(), 1);
      EXPECT_LT(K.residual, 1e-8);
      const auto& u = K.functions[0];
      const cplx scale = u(-1.0) / h_exact(rho, lambda, -1.0);
      for (double x : {-0.999, -0.5, 0.0, 0.37, 0.9, 0.99999})
        EXPECT_LT(std::abs(u(x) - scale * h_exact(rho, lambda, x)), 1e-9 * std::abs(scale * h_exact(rho, lambda, x)));
      const cplx ratio = K.Z(1, 0) / K.Z(0, 0);
      const cplx want = h_exact(rho, lambda, 1.0) / h_exact(rho, lambda, -1.0);
      EXPECT_LT(std::abs(ratio - want), 1e-10 * std::abs(want));
      EXPECT_FALSE(K.dmin_flag[0]);
      const Vec g = kernel_germs(gkm(rho), lambda);
      EXPECT_LT(std::abs(g(1) - want), 1e-10 * std::abs(want));
    }
  }
}

TEST(KernelFrame, ZeroSpectralParameterGivesConstants) {
  const auto K = kernel_frame(gkm(1.0), 0.0);
  ASSERT_EQ(K.d_prime(), 1);
  const auto& u = K.functions[0];
  for (double x : {-0.9, 0.0, 0.8}) EXPECT_LT(std::abs(u(x) - u(-1.0)), 1e-12 * std::abs(u(-1.0)));
  EXPECT_LT(std::abs(K.Z(0, 0) - K.Z(1, 0)), 1e-12 * std::abs(K.Z(0, 0)));
}

TEST(KernelFrame, HalfLineMembershipBySector) {
  const double rho = 1.0;
  const cplx p = 2.0 * std::exp(kI * rho);
  const auto model = ConeOperator1D::half_line(p);
  // Im(lambda e^{-i rho}) > 0: one decaying solution e^{i lambda x e^{-i rho} / 2}.
  for (cplx lambda : {kI * std::exp(kI * rho), cplx(0.3, 4.0) * std::exp(kI * rho)}) {
    const auto K = kernel_frame(model, lambda);
    ASSERT_EQ(K.d_prime(), 1);
    EXPECT_LT(K.residual, 1e-8);
    const auto& u = K.functions[0];
    for (double x : {0.1, 1.0, 3.0}) {
      const cplx want = u(1e-9) * std::exp(kI * lambda * (x - 1e-9) * std::exp(-kI * rho) / 2.0);
      EXPECT_LT(std::abs(u(x) - want), 1e-9 * std::abs(u(1e-9)));
    }
  }
  for (cplx lambda : {-kI * std::exp(kI * rho), cplx(-2.0, -1.0) * std::exp(kI * rho)})
    EXPECT_EQ(kernel_frame(model, lambda).d_prime(), 0);
  expect_throw_kind([&] { kernel_in_domain(model, cplx(1.0, 1e-9) * std::exp(kI * rho)); }, ErrorKind::AmbiguousMembership);
}

TEST(KernelFrame, IndicialRootAndStripCheck) {
  // q0 = -2 i s p0 l0 sigma0 puts the left root at sigma0.
  const auto ok = ConeOperator1D::interval(0.0, 1.0, ExpPoly(1.0), cplx(0.0, -0.3));
  EXPECT_LT(std::abs(ok.indicial_root(Side::Left) - cplx(0.0, 0.3)), 1e-14);
  expect_throw_kind([] { ConeOperator1D::interval(0.0, 1.0, ExpPoly(1.0), cplx(0.0, -0.8)); }, ErrorKind::UnsupportedOperator);
  const auto K = kernel_frame(ok, cplx(1.0, 1.0));
  EXPECT_LT(K.residual, 1e-8);
}

TEST(Emax, ExampleHasOneGermPerEndpoint) {
  const auto E = emax_basis(gkm(1.0));
  EXPECT_EQ(E.d, 2);
  EXPECT_LT((E.gram - E.gram.adjoint()).norm(), 1e-10 * E.gram.norm());
  Eigen::SelfAdjointEigenSolver<Mat> es(E.gram);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  for (int c = 0; c < 2; ++c) {
    EXPECT_LT(std::abs(E.u[c](-1.0) - (c == 0 ? 1.0 : 0.0)), 1e-9);
    EXPECT_LT(std::abs(E.u[c](1.0) - (c == 1 ? 1.0 : 0.0)), 1e-9);
  }
  // The stored Gram agrees with the graph inner product by spectral differentiation.
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      EXPECT_LT(std::abs(graph_inner(gkm(1.0), E.u[c], E.u[r]) - E.gram(r, c)), 1e-7);
}

TEST(Emax, MomentumGramClosedForm) {
  // e_L = sinh(1 - x) / sinh 2, e_R = sinh(1 + x) / sinh 2.
  const auto E = emax_basis(momentum());
  const double s2 = std::sinh(2.0);
  EXPECT_LT(std::abs(E.gram(0, 0) - std::cosh(2.0) / s2), 1e-9);
  EXPECT_LT(std::abs(E.gram(1, 1) - std::cosh(2.0) / s2), 1e-9);
  EXPECT_LT(std::abs(E.gram(0, 1) + 1.0 / s2), 1e-9);
  for (double x : {-0.7, 0.1, 0.6}) {
    EXPECT_LT(std::abs(E.u[0](x) - std::sinh(1.0 - x) / s2), 1e-10);
    EXPECT_LT(std::abs(E.w[0](x) - kI * std::cosh(1.0 - x) / s2), 1e-9);
  }
  EXPECT_LT(std::abs(E.agerm(0, 0) - kI * std::cosh(2.0) / s2), 1e-9);
  EXPECT_LT(std::abs(E.agerm(1, 0) - kI / s2), 1e-9);
}

TEST(Emax, ModelOperatorGramAndGenerator) {
  // e = exp(-x / |p|): ||e||^2 = ||Ae||^2 = |p| / 2.
  for (cplx p : {2.0 * std::exp(kI), cplx(0.5, 0.0)}) {
    const auto E = emax_basis(ConeOperator1D::half_line(p));
    EXPECT_EQ(E.d, 1);
    EXPECT_LT(std::abs(E.gram(0, 0) - std::abs(p)), 1e-9);
    ASSERT_TRUE(E.kappa_gen.has_value());
    EXPECT_LT(std::abs(E.kappa_gen->T()(0, 0) - 0.5), 1e-15);
    EXPECT_LT(std::abs(E.u[0](1.0) - std::exp(-1.0 / std::abs(p))), 1e-10);
  }
  const auto E = emax_basis(ConeOperator1D::half_line(1.0, cplx(0.0, -0.2)));
  EXPECT_LT(std::abs(E.kappa_gen->T()(0, 0) - cplx(0.5, 0.0) - kI * E.sigma[0]), 1e-15);
}

TEST(Emax, GramPositiveForRandomOperators) {
  cs::testing::Rng rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    const auto p = ExpPoly::exponential(std::polar(1.0, rng.uniform(-1.0, 1.0)), cplx(0.0, rng.uniform(-1.0, 1.0))) +
                   ExpPoly::monomial(0.2 * rng.uniform(-1.0, 1.0), 1);
    const auto q = ExpPoly::monomial(cplx(0.1 * rng.uniform(-1.0, 1.0), 0.1 * rng.uniform(-1.0, 1.0)), 0);
    const auto E = emax_basis(ConeOperator1D::interval(-1.0, 1.0, p, q));
    EXPECT_LT((E.gram - E.gram.adjoint()).norm(), 1e-9 * E.gram.norm());
    Eigen::LLT<Mat> llt(E.gram);
    EXPECT_EQ(llt.info(), Eigen::Success);
  }
}

TEST(Indices, ExampleAndMomentum) {
  for (const auto& op : {gkm(1.0), gkm(M_PI), momentum()}) {
    const auto I = indices(op);
    EXPECT_EQ(I.d, 2);
    EXPECT_EQ(I.d_prime, 1);
    EXPECT_EQ(I.d_dprime, 1);
    EXPECT_EQ(I.index_min(), -1);
    EXPECT_EQ(I.index_max(), 1);
  }
}

TEST(Indices, ModelSectors) {
  const auto model = ConeOperator1D::half_line(2.0 * std::exp(kI));
  const auto S = sector_indices(model);
  ASSERT_EQ(S.size(), 2u);
  EXPECT_EQ(S[0].d_prime, 1);
  EXPECT_EQ(S[0].d_dprime, 0);
  EXPECT_EQ(S[1].d_prime, 0);
  EXPECT_EQ(S[1].d_dprime, 1);
  for (const auto& I : S) EXPECT_EQ(I.d_prime + I.d_dprime, I.d);
}

TEST(SolveBvp, ZeroDataGivesZero) {
  const auto u = solve_bvp(gkm(1.0), domain_from_alpha(1.0, 1.0), cplx(0.5, 0.5), [](double) { return cplx{}; });
  EXPECT_EQ(u.l2_norm(), 0.0);
}

TEST(SolveBvp, AntiderivativeOracle) {
  // e^{-i x} (-i u') = e^{-i x}, u(-1) + u(1) = 0  =>  u = i x.
  const double rho = 1.0;
  const auto op = gkm(rho);
  const auto u = solve_bvp(op, domain_from_alpha(1.0, 1.0), 0.0, [&](double x) { return std::exp(-kI * rho * x); });
  EXPECT_LT(rel_l2(u, [](double x) { return kI * x; }), 1e-10);
  EXPECT_LT(operator_residual(op, 0.0, u, [&](double x) { return std::exp(-kI * rho * x); }), 1e-8);
}

TEST(SolveBvp, EigenvalueIsSingular) {
  const double lam0 = M_PI / (2.0 * std::sin(1.0));
  expect_throw_kind([&] { solve_bvp(gkm(1.0), domain_from_alpha(1.0, 1.0), lam0, [](double) { return cplx(1.0); }); },
                    ErrorKind::SingularSystem);
  expect_throw_kind([&] { solve_bvp(gkm(1.0), minimal_domain(2), 1.0, [](double) { return cplx(1.0); }); },
                    ErrorKind::DimensionMismatch);
}

TEST(SolveBvp, DomainConditionAndResidual) {
  cs::testing::Rng rng(5);
  const auto op = gkm(1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const cplx am(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)), ap(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const cplx lambda(rng.uniform(-5.0, 5.0), rng.uniform(0.5, 3.0));
    auto f = [](double x) { return std::cos(2.0 * x) + kI * x * x; };
    const auto u = solve_bvp(op, domain_from_alpha(am, ap), lambda, f);
    EXPECT_LT(std::abs(am * u(-1.0) + ap * u(1.0)), 1e-10 * u.l2_norm());
    EXPECT_LT(operator_residual(op, lambda, u, f), 1e-8);
  }
}

TEST(AssembleResolvent, AgreesWithDirectSolve) {
  cs::testing::Rng rng(2024);
  const auto op = gkm(1.0);
  const auto E = emax_basis(op);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const cplx am(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)), ap(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const cplx lambda(rng.uniform(-6.0, 6.0), rng.uniform(-3.0, 3.0));
    std::vector<cplx> c(4);
    for (auto& ck : c) ck = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    auto f = [c](double x) {
      cplx s{};
      for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::exp(kI * double(k) * x);
      return s;
    };
    const auto D = domain_from_alpha(am, ap);
    try {
      const auto u1 = solve_bvp(op, D, lambda, f);
      const auto u2 = assemble_resolvent(op, E, D, lambda, f);
      worst = std::max(worst, rel_l2(u1, as_rhs(u2)));
    } catch (const Error& e) {
      ADD_FAILURE() << e.what();
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(AssembleResolvent, NoCorrectionWhenBmaxAlreadyInDomain) {
  const auto op = gkm(1.0);
  const auto E = emax_basis(op);
  const cplx lambda(1.0, 0.5);
  auto f = [](double x) { return cplx(1.0 + x, std::sin(x)); };
  const auto b = apply_bmax(op, lambda, f);
  // Germs equal endpoint values here (both indicial roots are 0).
  Mat g(2, 1);
  g << b(-1.0), b(1.0);
  const DomainSpec D{orthonormalize(g), "range"};
  const auto u = assemble_resolvent(op, E, D, lambda, f);
  EXPECT_LT(rel_l2(u, as_rhs(b)), 1e-9);
}

TEST(Bmin, LeftInverseOnMinimalDomain) {
  // phi in D_min, f = (A - lambda) phi  =>  B_min f = phi.
  const double rho = 1.0;
  const auto op = gkm(rho);
  auto phi = [](double x) { return (1.0 - x * x) * std::exp(x); };
  auto dphi = [](double x) { return (1.0 - 2.0 * x - x * x) * std::exp(x); };
  for (cplx lambda : {cplx(0.7, 0.2), cplx(-3.0, 1.0)}) {
    auto f = [&](double x) { return -kI * std::exp(-kI * rho * x) * dphi(x) - lambda * phi(x); };
    const auto u = apply_bmin(op, lambda, f);
    EXPECT_LT(rel_l2(u, [&](double x) { return cplx(phi(x)); }), 1e-9);
  }
}

TEST(Bmax, OrthogonalToKernelInGraphNorm) {
  const auto op = gkm(1.0);
  const cplx lambda(2.0, -1.0);
  const auto b = apply_bmax(op, lambda, [](double x) { return cplx(x, 1.0); });
  SampledFunction h{b.grid, b.grid->sample([&](double x) { return h_exact(1.0, lambda, x); })};
  EXPECT_LT(std::abs(graph_inner(op, b, h)) / (std::sqrt(std::abs(graph_inner(op, b, b))) *
                                               std::sqrt(std::abs(graph_inner(op, h, h)))),
            1e-8);
}

TEST(ModelHomogeneity, KappaMapsKernelToKernel) {
  const auto model = ConeOperator1D::half_line(2.0 * std::exp(kI));
  const cplx lambda = cplx(0.5, 1.5) * std::exp(kI);
  const auto K = kernel_frame(model, lambda);
  ASSERT_EQ(K.d_prime(), 1);
  for (double rho : {2.0, 10.0}) {
    const auto Kr = kernel_frame(model, rho * lambda);
    ASSERT_EQ(Kr.d_prime(), 1);
    EXPECT_LT(line_angle(Kr.functions[0], kappa(rho, as_rhs(K.functions[0]))), 1e-8);
  }
}

TEST(ModelHomogeneity, ResolventScaling) {
  // B_D(lambda) = rho kappa_rho^{-1} B_D(rho lambda) kappa_rho on kappa-invariant D.
  const auto model = ConeOperator1D::half_line(2.0 * std::exp(kI));
  auto f = [](double x) { return std::exp(-x) * cplx(1.0, x); };
  for (cplx lambda : {cplx(0.5, 1.5) * std::exp(kI), cplx(1.0, -2.0) * std::exp(kI)}) {
    const int dp = kernel_in_domain(model, lambda) ? 1 : 0;
    const DomainSpec D = dp ? minimal_domain(1) : maximal_domain(1);
    const auto u1 = solve_bvp(model, D, lambda, f);
    for (double rho : {2.0, 10.0}) {
      const auto v = solve_bvp(model, D, rho * lambda, kappa(rho, f));
      auto u2 = [&](double x) { return rho / std::sqrt(rho) * v(x / rho); };
      EXPECT_LT(rel_l2(u1, u2), 1e-6);
    }
  }
}

TEST(ModelHomogeneity, GraphNormIdentity) {
  // ||kappa_{|lambda|}^{-1} u||_A^2 = |lambda|^{-2} ||A u||^2 + ||u||^2.
  const auto model = ConeOperator1D::half_line(2.0 * std::exp(kI));
  auto f = [](double x) { return std::exp(-x) * cplx(1.0, x); };
  for (cplx lambda : {cplx(1.0, 3.0) * std::exp(kI), cplx(0.2, -0.4) * std::exp(kI)}) {
    const double r = std::abs(lambda);
    const auto u = apply_bmax(model, lambda, f);
    const auto Au = apply_operator(model, u);
    const double rhs = std::pow(Au.l2_norm() / r, 2) + std::pow(u.l2_norm(), 2);
    auto grid = make_halfline_grid(u.grid->hi() * r, 2.0);
    SampledFunction v{grid, grid->sample([&](double x) { return u(x / r) / std::sqrt(r); })};
    const double lhs = std::abs(graph_inner(model, v, v));
    EXPECT_LT(std::abs(lhs - rhs) / rhs, 1e-9);
  }
}
