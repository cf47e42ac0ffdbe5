#pragma once

#include <memory>
#include <vector>

#include "conespectra/linalg.hpp"

namespace cs {

/// Piecewise Chebyshev (Clenshaw-Curtis) grid on [lo, hi]. A panel is Chebyshev
/// in a parameter p; near singular endpoints the parameter is log t.
class Grid {
 public:
  static constexpr int kNodes = 24;

  enum class Map { Linear, LogLeft, LogRight };
  struct Panel {
    double p0, p1;
    Map map = Map::Linear;
    double e = 0.0;  // endpoint for log maps
    double L = 1.0;  // x = e + L exp(p) or x = e - L exp(-p)
  };

  explicit Grid(std::vector<Panel> panels, bool zero_beyond_hi = false);

  int size() const { return static_cast<int>(x_.size()); }
  int panels() const { return static_cast<int>(panels_.size()); }
  const std::vector<double>& x() const { return x_; }
  /// Quadrature weights in x.
  const std::vector<double>& weights() const { return w_; }
  /// Panel map of node i, and its exact distance to the log endpoint (log panels only).
  Map kind(int i) const { return kind_[i]; }
  double dist(int i) const { return dist_[i]; }
  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }

  cplx integrate(const Vec& f) const;
  /// Integral from lo to each node.
  Vec cumulative(const Vec& f) const;
  /// Integral from each node to hi.
  Vec cumulative_from_right(const Vec& f) const;
  Vec derivative(const Vec& f) const;
  cplx interpolate(const Vec& f, double x) const;

  template <class F>
  Vec sample(F&& f) const {
    Vec v(size());
    for (int i = 0; i < size(); ++i) v(i) = f(x_[i]);
    return v;
  }

 private:
  double to_param(const Panel& P, double x) const;

  std::vector<Panel> panels_;
  bool zero_beyond_hi_;
  std::vector<double> x_, dxdp_, w_, dist_;
  std::vector<Map> kind_;
};

/// Graded grid for an interval [a, b] (both ends singular) or [0, x_max] with a
/// singular left end. Panel widths are limited by 8 / (bandwidth + 1).
std::shared_ptr<const Grid> make_interval_grid(double a, double b, double bandwidth);
std::shared_ptr<const Grid> make_halfline_grid(double x_max, double bandwidth);

/// Seed offset (fraction of the chart radius) and innermost resolved point.
inline constexpr double kSeedFraction = 1e-3;
inline constexpr double kInnerFraction = 1e-14;

}  // namespace cs
