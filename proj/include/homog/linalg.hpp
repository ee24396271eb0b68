#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <tuple>
#include <vector>

#include "homog/errors.hpp"

namespace homog {

/// Square sparse matrix in compressed-row layout, expected to be symmetric.
class CsrMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  CsrMatrix() = default;

  /// Builds from unordered triplets; duplicates are summed.
  CsrMatrix(std::size_t n, std::vector<Entry> entries) : n_(n), row_ptr_(n + 1, 0) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
    for (std::size_t k = 0; k < entries.size();) {
      const auto& e = entries[k];
      if (e.row >= n || e.col >= n) throw ValidationError("matrix entry out of range");
      double v = 0.0;
      std::size_t k2 = k;
      for (; k2 < entries.size() && entries[k2].row == e.row && entries[k2].col == e.col; ++k2) v += entries[k2].value;
      cols_.push_back(e.col);
      vals_.push_back(v);
      ++row_ptr_[e.row + 1];
      k = k2;
    }
    std::partial_sum(row_ptr_.begin(), row_ptr_.end(), row_ptr_.begin());
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return vals_.size(); }

  void multiply(std::span<const double> x, std::span<double> y) const noexcept {
    for (std::size_t r = 0; r < n_; ++r) {
      double s = 0.0;
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += vals_[k] * x[cols_[k]];
      y[r] = s;
    }
  }

  std::vector<double> operator*(std::span<const double> x) const {
    std::vector<double> y(n_);
    multiply(x, y);
    return y;
  }

  double at(std::size_t r, std::size_t c) const noexcept {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      if (cols_[k] == c) return vals_[k];
    return 0.0;
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r) d[r] = at(r, r);
    return d;
  }

  /// max |A_rc - A_cr| / max |A_rc|.
  double relative_asymmetry() const noexcept {
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        scale = std::max(scale, std::abs(vals_[k]));
        worst = std::max(worst, std::abs(vals_[k] - at(cols_[k], r)));
      }
    return scale > 0.0 ? worst / scale : 0.0;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
};

struct SolveOptions {
  double rel_tol = 1e-10;
  int max_iter = 0;  // 0: 50 * sqrt(n)
  /// Operator has the constants as null space; right-hand side and iterates are kept mean-free.
  bool project_constants = false;
  /// Called with (iteration, iterate) after every update.
  std::function<void(int, std::span<const double>)> observer;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void remove_mean(std::span<double> v) noexcept {
  if (v.empty()) return;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (auto& x : v) x -= m;
}

}  // namespace detail

/// Jacobi-preconditioned conjugate gradients.
///
/// Stops once the true residual satisfies |Ax - b| <= rel_tol |b|. With project_constants the
/// right-hand side is made mean-free first and the returned x has zero mean.
inline CgResult cg_solve(const CsrMatrix& A, std::span<const double> b_in, const SolveOptions& opts = {}) {
  if (!(opts.rel_tol > 0.0 && opts.rel_tol <= 1e-4)) throw ValidationError("rel_tol must lie in (0, 1e-4]");
  const std::size_t n = A.size();
  if (b_in.size() != n) throw ValidationError("right-hand side length does not match matrix");
  const int max_iter =
      opts.max_iter > 0 ? opts.max_iter : static_cast<int>(std::ceil(50.0 * std::sqrt(static_cast<double>(n))));

  std::vector<double> b(b_in.begin(), b_in.end());
  if (opts.project_constants) detail::remove_mean(b);

  CgResult result;
  result.x.assign(n, 0.0);
  const double bnorm = std::sqrt(detail::dot(b, b));
  if (bnorm == 0.0) return result;
  const double target = opts.rel_tol * bnorm;

  std::vector<double> inv_diag = A.diagonal();
  for (auto& d : inv_diag) {
    if (!(d > 0.0)) throw ValidationError("conjugate gradients needs a positive diagonal");
    d = 1.0 / d;
  }

  auto& x = result.x;
  std::vector<double> r = b, z(n), p(n), q(n);
  auto precondition = [&] {
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    if (opts.project_constants) detail::remove_mean(z);
  };
  precondition();
  p = z;
  double rz = detail::dot(r, z);

  for (int it = 1; it <= max_iter; ++it) {
    A.multiply(p, q);
    const double pq = detail::dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (opts.project_constants) detail::remove_mean(x);
    if (opts.observer) opts.observer(it, x);
    result.iterations = it;

    if (std::sqrt(detail::dot(r, r)) <= target) {
      // confirm against the true residual; recurrence drift can fake convergence
      A.multiply(x, q);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
      const double true_norm = std::sqrt(detail::dot(r, r));
      if (true_norm <= target) {
        result.relative_residual = true_norm / bnorm;
        return result;
      }
    }
    precondition();
    const double rz_new = detail::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  A.multiply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  throw NoConvergence(result.iterations, std::sqrt(detail::dot(r, r)) / bnorm);
}

/// Thomas algorithm for a symmetric tridiagonal system; off[i] couples unknowns i and i + 1.
inline std::vector<double> tridiag_solve(std::span<const double> diag, std::span<const double> off,
                                         std::span<const double> b) {
  const std::size_t n = diag.size();
  if (b.size() != n || (n > 0 && off.size() + 1 != n)) throw ValidationError("tridiagonal system size mismatch");
  if (n == 0) return {};
  double scale = 0.0;
  for (double d : diag) scale = std::max(scale, std::abs(d));
  const double tiny = 1e-14 * scale;

  std::vector<double> c(n), x(n);
  double pivot = diag[0];
  if (!(std::abs(pivot) > tiny)) throw ZeroPivot("zero pivot in row 0");
  c[0] = n > 1 ? off[0] / pivot : 0.0;
  x[0] = b[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - off[i - 1] * c[i - 1];
    if (!(std::abs(pivot) > tiny)) throw ZeroPivot("zero pivot in row " + std::to_string(i));
    c[i] = i + 1 < n ? off[i] / pivot : 0.0;
    x[i] = (b[i] - off[i - 1] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

}  // namespace homog
