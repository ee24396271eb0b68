#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "homog/cell.hpp"
#include "homog/grid.hpp"
#include "homog/macro.hpp"

namespace homog {

/// First-order approximation p1 = p0 + l N^j(x/l) dp0/dx_j + l w(x, x/l).
///
/// dp0 uses centred nodal differences. The w term is skipped when `sources` is null or carries no
/// flux. When the cell grid has exactly cells-per-period nodes, macro nodes coincide with cell
/// nodes and face differences of p1 reproduce the discrete two-scale chain rule.
inline MacroField assemble_p1(const MacroField& p0, const CellSolution& cell, const EffectiveSource* sources,
                              double l) {
  const auto& g = p0.grid();
  if (cell.field().dim() != g.dim()) throw ValidationError("cell and macro dimensions differ");
  const auto grad = gradient(p0);
  std::vector<double> p1(p0.values().begin(), p0.values().end());
  std::vector<MacroField> N;
  for (const auto& Nj : cell.N) N.push_back(sample_periodic(Nj, l, g));
  const bool with_w = sources != nullptr && sources->has_corrector();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec dp0 = grad.at(i);
    for (int j = 0; j < g.dim(); ++j) p1[i] += l * N[j][i] * dp0[j];
    if (with_w) {
      const Point x = g.coordinate(i);
      p1[i] += l * sources->w(x, {x[0] / l, x[1] / l});
    }
  }
  return MacroField(g, std::move(p1));
}

namespace detail {

inline void check_same_grid(const MacroField& a, const MacroField& b) {
  if (!(a.grid() == b.grid())) throw ValidationError("fields live on different grids");
}

}  // namespace detail

/// (1/D^dim) int ((p - p0)/D^2)^2 dx.
inline double scaled_l2_error(const MacroField& p, const MacroField& p0, double D) {
  detail::check_same_grid(p, p0);
  const auto& g = p.grid();
  std::vector<double> e(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = (p[i] - p0[i]) / (D * D);
    e[i] = d * d;
  }
  return integrate(MacroField(g, std::move(e))) / std::pow(D, g.dim());
}

/// (1/D^dim) int |grad((p - q)/D)|^2 dx with face differences, i.e. the scheme's own gradient.
inline double scaled_h1_error(const MacroField& p, const MacroField& q, double D) {
  detail::check_same_grid(p, q);
  const auto& g = p.grid();
  std::vector<double> e(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) e[i] = p[i] - q[i];
  const auto faces = face_gradient(MacroField(g, std::move(e)));
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const auto c = faces.component(a);
    for (std::size_t i = 0; i < g.size(); ++i) s += g.face_weight(a, i) * c[i] * c[i];
  }
  return s / (D * D) / std::pow(D, g.dim());
}

/// (1/D^dim) int (grad(p/D) . K grad(p/D) + (F/D) . grad(p/D)) dx for a discrete operator and face flux.
inline double potential_energy(const FluxOperator<MacroGrid>& op, const FaceField<MacroGrid>& flux,
                               const MacroField& p, double D) {
  const auto& g = op.grid();
  double s = op.energy(p.values(), p.values());
  const auto dp = face_gradient(p);
  for (int a = 0; a < g.dim(); ++a) {
    const auto F = flux.component(a);
    const auto c = dp.component(a);
    for (std::size_t i = 0; i < g.size(); ++i) s += g.face_weight(a, i) * F[i] * c[i];
  }
  return s / (D * D) / std::pow(D, g.dim());
}

struct EnergyGap {
  double E;
  double E0;
  double gap;
};

/// |E(p) - E0(p0)| for the fine and homogenized solutions.
inline EnergyGap energy_gap(const MacroField& p, const MacroField& p0, const FineProblem& fine,
                            const EffectiveModel& model) {
  detail::check_same_grid(p, p0);
  const auto& g = p.grid();
  const double l = fine.l;
  const auto fine_op = fine_operator(fine);
  const auto fine_flux = sample_faces(g, [&](const Point& x) { return fine.source.F(x, {x[0] / l, x[1] / l}); });
  const HomogenizedProblem hp{model, g, fine.solver};
  const auto hom_op = homogenized_operator(hp);
  const auto hom_flux = sample_faces(g, [&](const Point& x) { return model.F0(x); });
  EnergyGap r{};
  r.E = potential_energy(fine_op, fine_flux, p, fine.D);
  r.E0 = potential_energy(hom_op, hom_flux, p0, fine.D);
  r.gap = std::abs(r.E - r.E0);
  return r;
}

/// Scaled error metrics of one fine-vs-homogenized comparison.
struct ErrorReport {
  int dim = 1;
  double l = 1.0;
  double D = 1.0;
  double eps = 1.0;
  int cells_per_period = 16;
  double e_L2 = 0.0;
  double e_H1 = 0.0;
  double e_energy = 0.0;
  double e_H1_p0 = 0.0;  // H1 metric with p0 in place of p1, for comparison
  double E = 0.0;
  double E0 = 0.0;
};

}  // namespace homog
