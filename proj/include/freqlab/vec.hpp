#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "freqlab/common.hpp"

namespace freqlab {

inline double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

// x += a*y
inline void axpy(double a, std::span<const double> y, std::span<double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += a * y[i];
}

inline ParamVector scaled(std::span<const double> x, double a) {
  ParamVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i];
  return r;
}

inline ParamVector sub(std::span<const double> x, std::span<const double> y) {
  ParamVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

inline bool all_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

// Dense symmetric matrix used by the BFGS inverse-Hessian state.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double diag = 0.0) : n_(n), a_(n * n, 0.0) {
    for (std::size_t i = 0; i < n; ++i) a_[i * n + i] = diag;
  }
  static SquareMatrix identity(std::size_t n) { return SquareMatrix(n, 1.0); }

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {a_.data() + i * n_, n_}; }

  // r = A x
  void matvec(std::span<const double> x, std::span<double> r) const {
    for (std::size_t i = 0; i < n_; ++i) r[i] = dot(row(i), x);
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

}  // namespace freqlab
