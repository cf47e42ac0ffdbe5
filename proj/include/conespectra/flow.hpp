#pragma once

#include <string>
#include <vector>

#include "conespectra/grassmann.hpp"

namespace cs {

/// Generator T of the group zeta -> exp(zeta T) acting on C^d.
class FlowGenerator {
 public:
  FlowGenerator() = default;
  explicit FlowGenerator(Mat T);

  int dim() const { return static_cast<int>(T_.rows()); }
  const Mat& T() const { return T_; }
  Mat exp(cplx zeta) const;

 private:
  Mat T_;
};

Subspace flow_act(const FlowGenerator& gen, cplx zeta, const Subspace& V);

bool is_kappa_invariant(const FlowGenerator& gen, const Subspace& V, double tol = 1e-9);

struct OrbitSamples {
  std::vector<double> xi;
  std::vector<double> values;
  std::string subject;
};

enum class OrbitDirection { PushK, PullW };

/// delta(exp(xi T) K, W) for PushK, delta(K, exp(-xi T) W) for PullW.
OrbitSamples delta_along_orbit(const FlowGenerator& gen, const Subspace& K, const Subspace& W,
                               const std::vector<double>& xi_grid, OrbitDirection direction);

struct OrbitVerdict {
  enum class Kind { BoundedAway, Vanishing, PeriodicHits, Hits };
  Kind kind = Kind::BoundedAway;
  double infimum = 0.0;
  double period = 0.0;
  std::vector<double> hits;
};

std::string to_string(OrbitVerdict::Kind k);

OrbitVerdict detect_orbit_hits(const OrbitSamples& samples, double floor);

std::vector<double> linspace(double a, double b, int n);
inline std::vector<double> default_xi_grid() { return linspace(0.0, 10.0, 512); }

}  // namespace cs
