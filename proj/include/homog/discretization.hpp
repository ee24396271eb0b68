#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "homog/grid.hpp"
#include "homog/linalg.hpp"
#include "homog/tensor.hpp"

namespace homog {

/// Conservative (flux-form) discretization of u -> -div(K grad u) on a structured grid.
///
/// The bilinear form is
///   a(u, v) = sum_k sum_{k-faces} w_f K_kk(face) D_k u D_k v
///           + sum_{cells} w_c K_12(centre) (G_1 u G_2 v + G_2 u G_1 v),
/// where D_k is the face difference and G_k averages the two k-differences bounding a cell. In 1D
/// this is the classical harmonic-averaging scheme; with diagonal K it is the 5-point stencil.
template <StructuredGrid G>
class FluxOperator {
 public:
  using Coefficient = std::function<Tensor(const Point&)>;

  /// `coefficient` is evaluated at grid coordinates (face midpoints and cell centres).
  FluxOperator(G grid, const Coefficient& coefficient) : grid_(std::move(grid)) {
    const std::size_t n = grid_.size();
    for (int a = 0; a < grid_.dim(); ++a) {
      face_k_[a].assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        if (grid_.has_face(a, i)) face_k_[a][i] = coefficient(grid_.face_center(a, i))(a, a);
    }
    if (grid_.dim() == 2) {
      cell_k_.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        if (grid_.has_cell(i)) {
          const Tensor k = coefficient(grid_.cell_center(i));
          cell_k_[i] = 0.5 * (k(0, 1) + k(1, 0));
          if (cell_k_[i] != 0.0) off_diagonal_ = true;
        }
    }
  }

  const G& grid() const noexcept { return grid_; }
  std::span<const double> face_coefficient(int axis) const noexcept { return face_k_[axis]; }
  std::span<const double> cell_coefficient() const noexcept { return cell_k_; }
  bool has_off_diagonal() const noexcept { return off_diagonal_; }

  /// Face and cell gradients of a nodal vector, plus a constant gradient eta.
  struct Gradients {
    std::array<std::vector<double>, 2> face;
    std::array<std::vector<double>, 2> cell;
  };

  Gradients gradients(std::span<const double> u, const Vec& eta = {0.0, 0.0}) const {
    Gradients g;
    const double h = grid_.spacing();
    const std::size_t n = grid_.size();
    for (int a = 0; a < grid_.dim(); ++a) {
      g.face[a].assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        if (grid_.has_face(a, i)) g.face[a][i] = eta[a] + (u.empty() ? 0.0 : (u[grid_.neighbor(i, a, 1)] - u[i]) / h);
    }
    if (off_diagonal_) {
      for (int a = 0; a < 2; ++a) {
        g.cell[a].assign(n, 0.0);
        const int b = 1 - a;
        for (std::size_t i = 0; i < n; ++i)
          if (grid_.has_cell(i)) g.cell[a][i] = 0.5 * (g.face[a][i] + g.face[a][grid_.neighbor(i, b, 1)]);
      }
    }
    return g;
  }

  double energy(const Gradients& gu, const Gradients& gv) const {
    double s = 0.0;
    for (int a = 0; a < grid_.dim(); ++a)
      for (std::size_t i = 0; i < grid_.size(); ++i)
        s += grid_.face_weight(a, i) * face_k_[a][i] * gu.face[a][i] * gv.face[a][i];
    if (off_diagonal_)
      for (std::size_t i = 0; i < grid_.size(); ++i)
        s += grid_.cell_weight(i) * cell_k_[i] * (gu.cell[0][i] * gv.cell[1][i] + gu.cell[1][i] * gv.cell[0][i]);
    return s;
  }

  /// a(u, v).
  double energy(std::span<const double> u, std::span<const double> v) const {
    return energy(gradients(u), gradients(v));
  }

  /// out_i = a(u, phi_i) over every node of the grid.
  std::vector<double> apply(std::span<const double> u) const { return scatter_flux(gradients(u)); }

  /// Load vector of -div(K eta) for a constant gradient eta: b_i = -a(eta . y, phi_i).
  std::vector<double> affine_load(const Vec& eta) const {
    auto out = scatter_flux(gradients({}, eta));
    for (auto& v : out) v = -v;
    return out;
  }

  /// Weak form of div F: b_i = -sum_faces w F_k D_k phi_i, with F_k sampled on k-faces.
  std::vector<double> flux_load(const FaceField<G>& flux) const {
    std::vector<double> out(grid_.size(), 0.0);
    const double h = grid_.spacing();
    for (int a = 0; a < grid_.dim(); ++a) {
      const auto F = flux.component(a);
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!grid_.has_face(a, i)) continue;
        const double q = grid_.face_weight(a, i) * F[i] / h;
        out[i] += q;
        out[grid_.neighbor(i, a, 1)] -= q;
      }
    }
    return out;
  }

  /// a(y_k, u + eta . y) / |domain| for each axis k: the average flux <K (eta + grad u)>.
  Vec mean_flux(std::span<const double> u, const Vec& eta) const {
    const auto g = gradients(u, eta);
    Vec r{0.0, 0.0};
    for (int a = 0; a < grid_.dim(); ++a) {
      for (std::size_t i = 0; i < grid_.size(); ++i) r[a] += grid_.face_weight(a, i) * face_k_[a][i] * g.face[a][i];
      if (off_diagonal_)
        for (std::size_t i = 0; i < grid_.size(); ++i) r[a] += grid_.cell_weight(i) * cell_k_[i] * g.cell[1 - a][i];
    }
    const double vol = std::pow(grid_.extent(), grid_.dim());
    return {r[0] / vol, r[1] / vol};
  }

  /// Assembles the matrix restricted to nodes with dof[i] >= 0; other nodes are held at zero.
  CsrMatrix assemble(std::span<const std::ptrdiff_t> dof, std::size_t ndof) const {
    std::vector<CsrMatrix::Entry> entries;
    entries.reserve(ndof * (grid_.dim() == 1 ? 3 : (off_diagonal_ ? 9 : 5)) * 2);
    auto add = [&](std::size_t r, std::size_t c, double v) {
      if (dof[r] >= 0 && dof[c] >= 0)
        entries.push_back({static_cast<std::size_t>(dof[r]), static_cast<std::size_t>(dof[c]), v});
    };
    const double h = grid_.spacing();
    for (int a = 0; a < grid_.dim(); ++a)
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!grid_.has_face(a, i)) continue;
        const std::size_t j = grid_.neighbor(i, a, 1);
        const double k = grid_.face_weight(a, i) * face_k_[a][i] / (h * h);
        add(i, i, k);
        add(j, j, k);
        add(i, j, -k);
        add(j, i, -k);
      }
    if (off_diagonal_) {
      // nodes of a cell: lower-left, lower-right, upper-left, upper-right
      constexpr std::array<double, 4> g1{-1.0, 1.0, -1.0, 1.0};
      constexpr std::array<double, 4> g2{-1.0, -1.0, 1.0, 1.0};
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!grid_.has_cell(i) || cell_k_[i] == 0.0) continue;
        const std::size_t right = grid_.neighbor(i, 0, 1);
        const std::array<std::size_t, 4> nodes{i, right, grid_.neighbor(i, 1, 1), grid_.neighbor(right, 1, 1)};
        const double k = grid_.cell_weight(i) * cell_k_[i] / (4.0 * h * h);
        for (int r = 0; r < 4; ++r)
          for (int c = 0; c < 4; ++c) add(nodes[r], nodes[c], k * (g1[r] * g2[c] + g2[r] * g1[c]));
      }
    }
    return CsrMatrix(ndof, std::move(entries));
  }

 private:
  std::vector<double> scatter_flux(const Gradients& g) const {
    std::vector<double> out(grid_.size(), 0.0);
    const double h = grid_.spacing();
    for (int a = 0; a < grid_.dim(); ++a)
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!grid_.has_face(a, i)) continue;
        const double q = grid_.face_weight(a, i) * face_k_[a][i] * g.face[a][i] / h;
        out[i] -= q;
        out[grid_.neighbor(i, a, 1)] += q;
      }
    if (off_diagonal_) {
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!grid_.has_cell(i) || cell_k_[i] == 0.0) continue;
        const double w = grid_.cell_weight(i) * cell_k_[i] / (2.0 * h);
        const double q1 = w * g.cell[1][i];  // pairs with G_1 phi
        const double q2 = w * g.cell[0][i];  // pairs with G_2 phi
        const std::size_t right = grid_.neighbor(i, 0, 1);
        const std::size_t up = grid_.neighbor(i, 1, 1);
        const std::size_t diag = grid_.neighbor(right, 1, 1);
        out[i] += -q1 - q2;
        out[right] += q1 - q2;
        out[up] += -q1 + q2;
        out[diag] += q1 + q2;
      }
    }
    return out;
  }

  G grid_;
  std::array<std::vector<double>, 2> face_k_;
  std::vector<double> cell_k_;
  bool off_diagonal_ = false;
};

/// Samples a face-centred vector quantity: component k on k-faces.
template <StructuredGrid G, class Fn>
FaceField<G> sample_faces(const G& grid, Fn&& fn) {
  std::array<std::vector<double>, 2> v;
  for (int a = 0; a < grid.dim(); ++a) {
    v[a].assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid.has_face(a, i)) v[a][i] = fn(grid.face_center(a, i))[a];
  }
  return FaceField<G>(grid, std::move(v));
}

}  // namespace homog
