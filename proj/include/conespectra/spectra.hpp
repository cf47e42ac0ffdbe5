#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "conespectra/cone1d.hpp"
#include "conespectra/flow.hpp"
#include "conespectra/grassmann.hpp"

namespace cs {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work is split into fixed
/// contiguous blocks, so results written by index do not depend on the thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Worker count: explicit value if positive, else CONESPECTRA_THREADS, else 1.
int resolve_threads(int requested);

struct SpectralVerdict {
  enum class Kind { BgRes, BgSpec, EigenvalueOfD, ResolventPointOfD };
  cplx lambda;
  Kind classification = Kind::BgRes;
  int d_prime_at_lambda = 0;
  double delta_value = 0.0;
  std::string notes;
};

std::string to_string(SpectralVerdict::Kind k);

/// Background classification: bg-res iff dim K_lambda = d' and no kernel function
/// lies in D_min.
SpectralVerdict bg_classify(const ConeOperator1D& op, cplx lambda, std::optional<IndexData> idx = {});

/// Full classification against a domain: BgSpec, EigenvalueOfD or ResolventPointOfD.
SpectralVerdict classify(const ConeOperator1D& op, const DomainSpec& D, cplx lambda, double tol = 1e-8,
                         std::optional<IndexData> idx = {});

/// lambda -> Z(lambda), germ coordinates (d x d') of the kernel, holomorphic in lambda.
using KernelMap = std::function<Mat(cplx)>;
KernelMap kernel_map(const ConeOperator1D& op);

/// F(lambda) = det[Z(lambda) | W] with W orthonormal.
cplx spectral_determinant(const KernelMap& Z, const Subspace& W, cplx lambda);

struct RayRegion {
  cplx direction = 1.0;  // normalized internally
  double r0 = 0.1, r1 = 50.0;
  int samples = 1024;
};

struct RectRegion {
  cplx lo, hi;
  int nx = 256, ny = 256;
};

struct SpectrumScan {
  enum class Verdict { Roots, FullRegionInSpectrum };
  Verdict verdict = Verdict::Roots;
  std::vector<cplx> roots;          // sorted by modulus
  std::vector<double> root_delta;   // delta(span Z(root), W)
  double max_normalized = 0.0;      // sup over samples of delta(span Z, W)
  int samples = 0;
};

std::string to_string(SpectrumScan::Verdict v);

struct ScanOptions {
  int threads = 1;
  double full_region_tol = 1e-10;
  double root_tol = 1e-8;
};

SpectrumScan spectrum_scan(const KernelMap& Z, const DomainSpec& D, const RayRegion& ray, const ScanOptions& opt = {});
SpectrumScan spectrum_scan(const KernelMap& Z, const DomainSpec& D, const RectRegion& rect, const ScanOptions& opt = {});

/// pi_max pi_{K, D} pi_max on E_max germ coordinates, with its norm in the metric
/// coordinates y = metric * a. Throws DegenerateDecomposition when delta <= tol.
struct EigenProjection {
  Mat matrix;
  double norm = 0.0;            // in the (.,.)_A metric
  double euclidean_norm = 0.0;  // in germ coordinates
  double gram_condition = 1.0;
};

EigenProjection eigen_projection(const Mat& Z, const DomainSpec& D, const Mat& metric, double tol = 1e-12);

struct MinimalGrowthReport {
  enum class Verdict { SectorOfMinimalGrowth, Fails };
  cplx lambda_hat;
  OrbitSamples delta_samples;
  OrbitSamples norm_samples;
  Verdict verdict = Verdict::Fails;
  double bound = 0.0;   // C when minimal growth holds
  std::string reason;   // Fails reason or shortcut note
};

std::string to_string(MinimalGrowthReport::Verdict v);

/// Samples delta(K_hat, exp(-xi T) W) and the metric norm of the projection on K_hat
/// along exp(-xi T) W.
MinimalGrowthReport minimal_growth_check(const FlowGenerator& gen, const Mat& metric, const Subspace& K_hat,
                                         const DomainSpec& D, cplx lambda_hat,
                                         const std::vector<double>& xi_grid = default_xi_grid(), double floor = 1e-8);

/// Model-operator form: E supplies the generator and metric; K_hat is the kernel at lambda_hat.
MinimalGrowthReport minimal_growth_check(const ConeOperator1D& model, const EmaxBasis& E, const DomainSpec& D,
                                         cplx lambda_hat, const std::vector<double>& xi_grid = default_xi_grid(),
                                         double floor = 1e-8);

/// Pairing [u, v] = (Au, v) - (u, A* v) on E_max(A) x E_max(A*): entry (r, c) pairs
/// e_c with f_r, so [u, v] = b^H P a in germ coordinates.
struct PairingMatrix {
  Mat P;
  double condition = 1.0;
  double quadrature_mismatch = 0.0;  // boundary formula vs integrals
};

PairingMatrix dirichlet_pairing_matrix(const ConeOperator1D& op, const EmaxBasis& E, const EmaxBasis& Estar);

/// Annihilator of D in D_max(A*) and back.
DomainSpec adjoint_domain(const PairingMatrix& pm, const DomainSpec& D);
DomainSpec preadjoint_domain(const PairingMatrix& pm, const DomainSpec& Dstar);

/// Tools for symmetric operators (A* = A formally).
class SelfAdjointTools {
 public:
  /// Throws NotSymmetric unless op is symmetric.
  explicit SelfAdjointTools(const ConeOperator1D& op);

  const EmaxBasis& emax() const { return E_; }
  const PairingMatrix& pairing() const { return pm_; }

  bool is_selfadjoint(const DomainSpec& D, double tol = 1e-9) const;

  /// D_lambda = K_lambda + D_min for real lambda; DegenerateKernel if Z(lambda) is rank deficient.
  DomainSpec d_lambda(double lambda) const;

  /// Chart around an SA base point with phi2 = A phi1; SA domains have Hermitian coordinates.
  const Chart& chart() const { return chart_; }
  /// ||Z - Z^H|| / (1 + ||Z||^2) for the chart coordinates Z of D, the chart's own scale.
  double chart_constraint(const DomainSpec& D) const;

 private:
  ConeOperator1D op_;
  EmaxBasis E_;
  PairingMatrix pm_;
  Chart chart_;
};

/// Lower bound for ||B_D(lambda)|| from a fixed probe space of right-hand sides,
/// times |lambda|, at each radius along a ray.
struct ResolventRaySample {
  double r;
  cplx lambda;
  double norm;
  double scaled;  // |lambda| * norm
};

std::vector<ResolventRaySample> resolvent_norm_along_ray(const ConeOperator1D& op, const DomainSpec& D, cplx direction,
                                                        const std::vector<double>& radii, int probes = 8,
                                                        int threads = 1);

}  // namespace cs
