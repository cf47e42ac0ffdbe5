#pragma once

#include <vector>

#include "conespectra/error.hpp"
#include "conespectra/linalg.hpp"

namespace cs {

/// A point of Gr_k(C^d), stored as a d x k frame with orthonormal columns.
class Subspace {
 public:
  Subspace() = default;

  static Subspace zero(int ambient_dim);
  static Subspace full(int ambient_dim);

  int ambient_dim() const { return static_cast<int>(frame_.rows()); }
  int dim() const { return static_cast<int>(frame_.cols()); }
  const Mat& frame() const { return frame_; }
  double tol() const { return tol_; }

  /// Orthogonal projector onto the subspace.
  Mat projector() const { return frame_ * frame_.adjoint(); }
  /// Orthonormal frame of the orthogonal complement.
  Subspace complement() const;

 private:
  friend Subspace orthonormalize(const Mat&, double);
  Subspace(Mat frame, double tol) : frame_(std::move(frame)), tol_(tol) {}

  Mat frame_;
  double tol_ = kDefaultRankTol;
};

/// Orthonormal frame for the column span; throws RankDeficient if the columns
/// are dependent at relative tolerance `tol`.
Subspace orthonormalize(const Mat& frame, double tol = kDefaultRankTol);

/// Orthonormal frame for the column span with rank decided at `tol`; never throws
/// for rank deficiency.
Subspace span_of(const Mat& columns, double tol = kDefaultRankTol);

/// Principal angles in [0, pi/2], nondecreasing, min(dim V, dim W) of them.
std::vector<double> principal_angles(const Subspace& V, const Subspace& W);

/// Dimension of V ∩ W decided by principal angles below `tol`.
int intersection_dim(const Subspace& V, const Subspace& W, double tol = 1e-8);

/// |det[V|W]| for complementary dimensions.
double delta(const Subspace& V, const Subspace& W);

/// True when V meets W nontrivially (V in the incidence variety of W).
bool in_incidence_variety(const Subspace& V, const Subspace& W, double tol = 1e-8);

struct ObliqueProjection {
  Mat matrix;
  Subspace range;
  Subspace kernel;
  double norm = 0.0;
};

/// Projection onto V along W, for dim V + dim W = d and delta(V, W) > tol.
ObliqueProjection oblique_projection(const Subspace& V, const Subspace& W, double tol = 1e-12);

/// Constant C(d) with ||pi_{V,W}|| * delta(V, W) <= C(d). Every (d-1)-minor of a
/// matrix with unit columns is at most 1 (Hadamard), so the top block of the
/// adjugate has Frobenius norm at most sqrt(k d) <= sqrt(d (d - 1)).
double minor_bound(int d);

/// Affine chart Z -> span(phi1 + phi2 Z) around span(phi1).
class Chart {
 public:
  Chart(Mat phi1, Mat phi2);

  const Mat& phi1() const { return phi1_; }
  const Mat& phi2() const { return phi2_; }
  double condition() const { return condition_; }
  int ambient_dim() const { return static_cast<int>(phi1_.rows()); }
  int k() const { return static_cast<int>(phi1_.cols()); }

 private:
  Mat phi1_, phi2_;
  double condition_ = 1.0;
};

Subspace chart_point(const Chart& chart, const Mat& Z);
Mat chart_coords(const Chart& chart, const Subspace& V, double tol = kDefaultRankTol);

}  // namespace cs
