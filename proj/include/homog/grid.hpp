#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "homog/errors.hpp"
#include "homog/tensor.hpp"

namespace homog {

/// Uniform node-centred grid over [0, extent]^dim, either periodic or with Dirichlet boundary nodes.
///
/// Nodes are numbered with axis 0 running fastest. A face (k, i) joins node i to its neighbour
/// along axis k; on periodic grids every node owns one face per axis, on Dirichlet grids the
/// last node along k owns none.
class GridBase {
 public:
  int dim() const noexcept { return dim_; }
  int nodes_per_axis() const noexcept { return nodes_; }
  double spacing() const noexcept { return spacing_; }
  double extent() const noexcept { return extent_; }
  bool periodic() const noexcept { return periodic_; }

  std::size_t size() const noexcept {
    return dim_ == 1 ? static_cast<std::size_t>(nodes_) : static_cast<std::size_t>(nodes_) * nodes_;
  }

  std::array<int, 2> multi_index(std::size_t idx) const noexcept {
    const int i = static_cast<int>(idx % nodes_);
    const int j = dim_ == 2 ? static_cast<int>(idx / nodes_) : 0;
    return {i, j};
  }

  std::size_t index(int i, int j = 0) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(nodes_) * static_cast<std::size_t>(j);
  }

  Point coordinate(std::size_t idx) const noexcept {
    const auto mi = multi_index(idx);
    return {mi[0] * spacing_, dim_ == 2 ? mi[1] * spacing_ : 0.0};
  }

  /// Midpoint of face (axis, idx).
  Point face_center(int axis, std::size_t idx) const noexcept {
    Point p = coordinate(idx);
    p[axis] += 0.5 * spacing_;
    return p;
  }

  /// Centre of the cell whose lower-left node is idx (2D only).
  Point cell_center(std::size_t idx) const noexcept {
    Point p = coordinate(idx);
    p[0] += 0.5 * spacing_;
    p[1] += 0.5 * spacing_;
    return p;
  }

  bool has_face(int axis, std::size_t idx) const noexcept {
    return periodic_ || multi_index(idx)[axis] < nodes_ - 1;
  }

  /// A 2D cell with lower-left node idx exists.
  bool has_cell(std::size_t idx) const noexcept {
    if (dim_ != 2) return false;
    if (periodic_) return true;
    const auto mi = multi_index(idx);
    return mi[0] < nodes_ - 1 && mi[1] < nodes_ - 1;
  }

  /// Neighbour of idx one step along axis (step = +1 or -1), wrapping on periodic grids.
  /// Callers guarantee the neighbour exists on Dirichlet grids.
  std::size_t neighbor(std::size_t idx, int axis, int step) const noexcept {
    auto mi = multi_index(idx);
    mi[axis] += step;
    if (periodic_) mi[axis] = (mi[axis] % nodes_ + nodes_) % nodes_;
    return index(mi[0], mi[1]);
  }

  bool on_boundary(std::size_t idx) const noexcept {
    if (periodic_) return false;
    const auto mi = multi_index(idx);
    for (int a = 0; a < dim_; ++a)
      if (mi[a] == 0 || mi[a] == nodes_ - 1) return true;
    return false;
  }

  /// Quadrature weight of node idx: rectangle rule on periodic grids, trapezoidal on Dirichlet grids.
  double node_weight(std::size_t idx) const noexcept {
    double w = std::pow(spacing_, dim_);
    if (periodic_) return w;
    const auto mi = multi_index(idx);
    for (int a = 0; a < dim_; ++a)
      if (mi[a] == 0 || mi[a] == nodes_ - 1) w *= 0.5;
    return w;
  }

  /// Quadrature weight of face (axis, idx): full length along the axis, trapezoidal across it.
  double face_weight(int axis, std::size_t idx) const noexcept {
    if (!has_face(axis, idx)) return 0.0;
    double w = std::pow(spacing_, dim_);
    if (periodic_) return w;
    const auto mi = multi_index(idx);
    for (int a = 0; a < dim_; ++a)
      if (a != axis && (mi[a] == 0 || mi[a] == nodes_ - 1)) w *= 0.5;
    return w;
  }

  double cell_weight(std::size_t idx) const noexcept { return has_cell(idx) ? spacing_ * spacing_ : 0.0; }

  friend bool operator==(const GridBase&, const GridBase&) = default;

 protected:
  GridBase(int dim, int nodes, double spacing, double extent, bool periodic)
      : dim_(dim), nodes_(nodes), spacing_(spacing), extent_(extent), periodic_(periodic) {}

 private:
  int dim_;
  int nodes_;
  double spacing_;
  double extent_;
  bool periodic_;
};

/// Periodic grid on the unit cell Y = [0,1)^dim; node n along an axis is node 0.
class UnitCellGrid : public GridBase {
 public:
  UnitCellGrid(int dim, int n) : GridBase(checked(dim, n), n, 1.0 / n, 1.0, true) {}

 private:
  static int checked(int dim, int n) {
    check_dim(dim);
    if (n < 4) throw ValidationError("unit-cell grid needs at least 4 nodes per axis");
    return dim;
  }
};

/// Grid over the macro domain (0, D)^dim with m nodes per axis, boundary nodes included.
class MacroGrid : public GridBase {
 public:
  MacroGrid(int dim, double extent, int m) : GridBase(checked(dim, extent, m), m, extent / (m - 1), extent, false) {}

 private:
  static int checked(int dim, double extent, int m) {
    check_dim(dim);
    if (!(extent > 0.0)) throw ValidationError("macro extent D must be positive");
    if (m < 3) throw ValidationError("macro grid needs at least 3 nodes per axis");
    return dim;
  }
};

template <class G>
concept StructuredGrid = std::derived_from<G, GridBase>;

template <StructuredGrid G>
class ScalarField {
 public:
  ScalarField(G grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw ValidationError("field length does not match grid node count");
  }

  const G& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  G grid_;
  std::vector<double> values_;
};

template <StructuredGrid G>
class VectorField {
 public:
  VectorField(G grid, std::array<std::vector<double>, 2> components)
      : grid_(std::move(grid)), components_(std::move(components)) {
    for (int a = 0; a < grid_.dim(); ++a)
      if (components_[a].size() != grid_.size()) throw ValidationError("field length does not match grid node count");
  }

  const G& grid() const noexcept { return grid_; }
  std::span<const double> component(int axis) const noexcept { return components_[axis]; }
  Vec at(std::size_t i) const noexcept {
    return {components_[0][i], grid_.dim() == 2 ? components_[1][i] : 0.0};
  }

 private:
  G grid_;
  std::array<std::vector<double>, 2> components_;
};

/// One value per face and axis; component(k)[i] lives on face (k, i). Missing faces hold 0.
template <StructuredGrid G>
class FaceField {
 public:
  FaceField(G grid, std::array<std::vector<double>, 2> values) : grid_(std::move(grid)), values_(std::move(values)) {
    for (int a = 0; a < grid_.dim(); ++a)
      if (values_[a].size() != grid_.size()) throw ValidationError("face field length does not match grid");
  }

  const G& grid() const noexcept { return grid_; }
  std::span<const double> component(int axis) const noexcept { return values_[axis]; }

 private:
  G grid_;
  std::array<std::vector<double>, 2> values_;
};

template <StructuredGrid G, class Fn>
ScalarField<G> make_field(const G& grid, Fn&& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.coordinate(i));
  return ScalarField<G>(grid, std::move(v));
}

/// Quadrature of a nodal field over its domain (measure 1 on the unit cell, D^dim on the macro grid).
template <StructuredGrid G>
double integrate(const ScalarField<G>& field) {
  const auto& g = field.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) s += g.node_weight(i) * field[i];
  return s;
}

/// Face quadrature of one component of a face field.
template <StructuredGrid G>
double integrate(const FaceField<G>& field, int axis) {
  const auto& g = field.grid();
  const auto v = field.component(axis);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += g.face_weight(axis, i) * v[i];
  return s;
}

/// Nodal gradient: centred differences, wrapping on periodic grids and second-order one-sided
/// stencils on Dirichlet boundary nodes.
template <StructuredGrid G>
VectorField<G> gradient(const ScalarField<G>& field) {
  const auto& g = field.grid();
  const double h = g.spacing();
  const int n = g.nodes_per_axis();
  std::array<std::vector<double>, 2> out;
  for (int a = 0; a < g.dim(); ++a) {
    out[a].resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const int k = g.multi_index(i)[a];
      if (g.periodic() || (k > 0 && k < n - 1)) {
        out[a][i] = (field[g.neighbor(i, a, 1)] - field[g.neighbor(i, a, -1)]) / (2.0 * h);
      } else if (k == 0) {
        const auto i1 = g.neighbor(i, a, 1);
        out[a][i] = (-3.0 * field[i] + 4.0 * field[i1] - field[g.neighbor(i1, a, 1)]) / (2.0 * h);
      } else {
        const auto i1 = g.neighbor(i, a, -1);
        out[a][i] = (3.0 * field[i] - 4.0 * field[i1] + field[g.neighbor(i1, a, -1)]) / (2.0 * h);
      }
    }
  }
  return VectorField<G>(g, std::move(out));
}

/// Differences across faces, (u(i + e_k) - u(i)) / h on face (k, i).
template <StructuredGrid G>
FaceField<G> face_gradient(const ScalarField<G>& field) {
  const auto& g = field.grid();
  std::array<std::vector<double>, 2> out;
  for (int a = 0; a < g.dim(); ++a) {
    out[a].assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.has_face(a, i)) out[a][i] = (field[g.neighbor(i, a, 1)] - field[i]) / g.spacing();
  }
  return FaceField<G>(g, std::move(out));
}

/// Multilinear interpolation of a cell field at y (taken mod 1 along every axis).
inline double interpolate_periodic(const ScalarField<UnitCellGrid>& cell_field, const Point& y) {
  const auto& g = cell_field.grid();
  const int n = g.nodes_per_axis();
  std::array<int, 2> lo{0, 0};
  std::array<double, 2> t{0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    const double s = (y[a] - std::floor(y[a])) * n;
    const double fl = std::floor(s);
    lo[a] = static_cast<int>(fl) % n;
    t[a] = s - fl;
  }
  auto at = [&](int di, int dj) { return cell_field[g.index((lo[0] + di) % n, g.dim() == 2 ? (lo[1] + dj) % n : 0)]; };
  if (g.dim() == 1) return (1.0 - t[0]) * at(0, 0) + t[0] * at(1, 0);
  return (1.0 - t[0]) * (1.0 - t[1]) * at(0, 0) + t[0] * (1.0 - t[1]) * at(1, 0) + (1.0 - t[0]) * t[1] * at(0, 1) +
         t[0] * t[1] * at(1, 1);
}

/// Evaluates the cell field at y = (x / l) mod 1 for every macro node.
inline ScalarField<MacroGrid> sample_periodic(const ScalarField<UnitCellGrid>& cell_field, double l,
                                              const MacroGrid& macro) {
  if (!(l > 0.0)) throw ValidationError("period length l must be positive");
  if (l > macro.extent()) throw ValidationError("period length l must not exceed the domain size D");
  if (cell_field.grid().dim() != macro.dim()) throw ValidationError("cell and macro grid dimensions differ");
  return make_field(macro, [&](const Point& x) { return interpolate_periodic(cell_field, {x[0] / l, x[1] / l}); });
}

}  // namespace homog
