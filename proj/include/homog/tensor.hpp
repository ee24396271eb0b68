#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "homog/errors.hpp"

namespace homog {

/// A point (or vector) in one or two space dimensions; unused trailing entries are zero.
using Point = std::array<double, 2>;
using Vec = std::array<double, 2>;

inline void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw ValidationError("dimension must be 1 or 2, got " + std::to_string(dim));
}

/// Small dense dim x dim matrix (dim <= 2), row-major.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(int dim) : dim_(dim) { check_dim(dim); }

  static Tensor identity(int dim, double scale = 1.0) {
    Tensor t(dim);
    for (int i = 0; i < dim; ++i) t(i, i) = scale;
    return t;
  }

  static Tensor diagonal(double a, double b) {
    Tensor t(2);
    t(0, 0) = a;
    t(1, 1) = b;
    return t;
  }

  int dim() const noexcept { return dim_; }
  double& operator()(int i, int j) noexcept { return a_[2 * i + j]; }
  double operator()(int i, int j) const noexcept { return a_[2 * i + j]; }

  Vec apply(const Vec& v) const noexcept {
    Vec r{0.0, 0.0};
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  Tensor transposed() const noexcept {
    Tensor t = *this;
    std::swap(t(0, 1), t(1, 0));
    return t;
  }

  /// Largest |K_ij - K_ji|.
  double asymmetry() const noexcept { return dim_ == 2 ? std::abs(a_[1] - a_[2]) : 0.0; }

  /// Eigenvalues of the symmetric part, ascending.
  std::pair<double, double> eigenvalues() const noexcept {
    if (dim_ == 1) return {a_[0], a_[0]};
    const double off = 0.5 * (a_[1] + a_[2]);
    const double mean = 0.5 * (a_[0] + a_[3]);
    const double radius = std::hypot(0.5 * (a_[0] - a_[3]), off);
    return {mean - radius, mean + radius};
  }

  Tensor inverse() const {
    Tensor t(dim_);
    if (dim_ == 1) {
      t(0, 0) = 1.0 / a_[0];
      return t;
    }
    const double det = a_[0] * a_[3] - a_[1] * a_[2];
    if (det == 0.0) throw ValidationError("singular tensor");
    t(0, 0) = a_[3] / det;
    t(0, 1) = -a_[1] / det;
    t(1, 0) = -a_[2] / det;
    t(1, 1) = a_[0] / det;
    return t;
  }

  Tensor& operator+=(const Tensor& o) noexcept {
    for (int k = 0; k < 4; ++k) a_[k] += o.a_[k];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) noexcept {
    for (int k = 0; k < 4; ++k) a_[k] -= o.a_[k];
    return *this;
  }
  Tensor& operator*=(double s) noexcept {
    for (auto& v : a_) v *= s;
    return *this;
  }
  friend Tensor operator+(Tensor a, const Tensor& b) noexcept { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) noexcept { return a -= b; }
  friend Tensor operator*(double s, Tensor a) noexcept { return a *= s; }

  /// Max-abs entry, used as a matrix norm in tolerance checks.
  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  int dim_ = 1;
  std::array<double, 4> a_{};
};

}  // namespace homog
