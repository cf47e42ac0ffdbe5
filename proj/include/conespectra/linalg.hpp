#pragma once

#include <complex>

#include <Eigen/Dense>

namespace cs {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Relative singular-value threshold used for rank and intersection decisions.
inline constexpr double kDefaultRankTol = 1e-9;

}  // namespace cs
