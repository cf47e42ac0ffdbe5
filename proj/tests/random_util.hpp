#pragma once

#include <random>

#include "conespectra/linalg.hpp"

namespace cs::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(gen_); }
  cplx normal() { return {n_(gen_), n_(gen_)}; }
  Mat matrix(int r, int c) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = normal();
    return m;
  }
  Mat unitary(int n) {
    Eigen::HouseholderQR<Mat> qr(matrix(n, n));
    return qr.householderQ() * Mat::Identity(n, n);
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> n_{0.0, 1.0};
};

}  // namespace cs::testing
