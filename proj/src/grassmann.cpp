#include "conespectra/grassmann.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace cs {

namespace {

void require_same_ambient(const Subspace& V, const Subspace& W) {
  if (V.ambient_dim() != W.ambient_dim())
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("ambient dimensions {} and {}", V.ambient_dim(), W.ambient_dim()));
}

}  // namespace

Subspace Subspace::zero(int ambient_dim) { return Subspace(Mat(ambient_dim, 0), kDefaultRankTol); }

Subspace Subspace::full(int ambient_dim) {
  return Subspace(Mat::Identity(ambient_dim, ambient_dim), kDefaultRankTol);
}

Subspace Subspace::complement() const {
  const int d = ambient_dim();
  if (dim() == 0) return full(d);
  if (dim() == d) return zero(d);
  Eigen::JacobiSVD<Mat> svd(frame_, Eigen::ComputeFullU);
  return Subspace(svd.matrixU().rightCols(d - dim()), tol_);
}

Subspace orthonormalize(const Mat& frame, double tol) {
  const auto k = frame.cols();
  if (k > frame.rows())
    throw Error(ErrorKind::RankDeficient, fmt::format("{} columns in C^{}", k, frame.rows()));
  if (k == 0) return Subspace(Mat(frame.rows(), 0), tol);
  Eigen::JacobiSVD<Mat> svd(frame, Eigen::ComputeThinU);
  const RVec& s = svd.singularValues();
  if (s(0) == 0.0 || s(k - 1) <= tol * s(0))
    throw Error(ErrorKind::RankDeficient,
                fmt::format("numerical rank below {} (smallest/largest singular value {:.3e})", k,
                            s(0) == 0.0 ? 0.0 : s(k - 1) / s(0)));
  return Subspace(svd.matrixU(), tol);
}

Subspace span_of(const Mat& columns, double tol) {
  if (columns.cols() == 0) return Subspace::zero(static_cast<int>(columns.rows()));
  Eigen::JacobiSVD<Mat> svd(columns, Eigen::ComputeThinU);
  const RVec& s = svd.singularValues();
  int r = 0;
  while (r < s.size() && s(0) > 0.0 && s(r) > tol * s(0)) ++r;
  return orthonormalize(svd.matrixU().leftCols(r), tol);
}

std::vector<double> principal_angles(const Subspace& V, const Subspace& W) {
  require_same_ambient(V, W);
  const Subspace& A = V.dim() >= W.dim() ? V : W;
  const Subspace& B = V.dim() >= W.dim() ? W : V;
  const int k = B.dim();
  std::vector<double> out(k);
  if (k == 0) return out;
  // Cosines resolve large angles, sines resolve small ones.
  RVec cosv = Eigen::JacobiSVD<Mat>(A.frame().adjoint() * B.frame()).singularValues();
  Mat residual = B.frame() - A.frame() * (A.frame().adjoint() * B.frame());
  RVec sinv = Eigen::JacobiSVD<Mat>(residual).singularValues();
  for (int i = 0; i < k; ++i) {
    const double c = std::min(1.0, cosv(i));
    const double s = std::min(1.0, sinv(k - 1 - i));
    out[i] = (c * c < 0.5) ? std::acos(c) : std::asin(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int intersection_dim(const Subspace& V, const Subspace& W, double tol) {
  const auto angles = principal_angles(V, W);
  return static_cast<int>(std::count_if(angles.begin(), angles.end(), [&](double a) { return a < tol; }));
}

double delta(const Subspace& V, const Subspace& W) {
  require_same_ambient(V, W);
  const int d = V.ambient_dim();
  if (V.dim() + W.dim() != d)
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("dim V + dim W = {} + {} != {}", V.dim(), W.dim(), d));
  if (d == 0) return 1.0;
  Mat P(d, d);
  P << V.frame(), W.frame();
  return std::abs(P.determinant());
}

bool in_incidence_variety(const Subspace& V, const Subspace& W, double tol) {
  return delta(V, W) < tol;
}

ObliqueProjection oblique_projection(const Subspace& V, const Subspace& W, double tol) {
  const double dl = delta(V, W);
  if (dl <= tol)
    throw Error(ErrorKind::DegenerateDecomposition, fmt::format("delta(V, W) = {:.3e}", dl));
  const int d = V.ambient_dim();
  const int k = V.dim();
  ObliqueProjection out{Mat::Zero(d, d), V, W, 0.0};
  if (k == 0) return out;
  Mat P(d, d);
  P << V.frame(), W.frame();
  Mat Q = P.partialPivLu().inverse();
  out.matrix = V.frame() * Q.topRows(k);
  out.norm = Eigen::JacobiSVD<Mat>(out.matrix).singularValues()(0);
  return out;
}

double minor_bound(int d) { return std::max(1.0, std::sqrt(double(d) * double(d - 1))); }

Chart::Chart(Mat phi1, Mat phi2) : phi1_(std::move(phi1)), phi2_(std::move(phi2)) {
  const auto d = phi1_.rows();
  if (phi2_.rows() != d || phi1_.cols() + phi2_.cols() != d)
    throw Error(ErrorKind::DimensionMismatch, "chart frames do not form a square basis");
  if (d == 0) return;
  Mat B(d, d);
  B << phi1_, phi2_;
  RVec s = Eigen::JacobiSVD<Mat>(B).singularValues();
  if (s(d - 1) <= kDefaultRankTol * s(0))
    throw Error(ErrorKind::RankDeficient, "chart frames are not a basis");
  condition_ = s(0) / s(d - 1);
}

Subspace chart_point(const Chart& chart, const Mat& Z) {
  if (Z.rows() != chart.phi2().cols() || Z.cols() != chart.phi1().cols())
    throw Error(ErrorKind::DimensionMismatch, "chart coordinate shape");
  return orthonormalize(chart.phi1() + chart.phi2() * Z);
}

Mat chart_coords(const Chart& chart, const Subspace& V, double tol) {
  const int d = chart.ambient_dim();
  const int k = chart.k();
  if (V.ambient_dim() != d || V.dim() != k)
    throw Error(ErrorKind::DimensionMismatch, "subspace does not match chart");
  if (k == 0) return Mat(d, 0);
  Mat B(d, d);
  B << chart.phi1(), chart.phi2();
  Mat X = B.partialPivLu().solve(V.frame());
  Mat X1 = X.topRows(k);
  RVec s = Eigen::JacobiSVD<Mat>(X1).singularValues();
  const double scale = Eigen::JacobiSVD<Mat>(X).singularValues()(0);
  if (s(k - 1) <= tol * scale)
    throw Error(ErrorKind::OutsideChart, "phi1 block of the subspace is singular");
  return X.bottomRows(d - k) * X1.inverse();
}

}  // namespace cs
