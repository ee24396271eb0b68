#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "homog/cell.hpp"
#include "homog/discretization.hpp"
#include "homog/errors.hpp"
#include "homog/fields.hpp"
#include "homog/grid.hpp"
#include "homog/linalg.hpp"

namespace homog {

using MacroField = ScalarField<MacroGrid>;

/// Macro grid on (0, D)^dim with `cells_per_period` cells per micro period l.
inline MacroGrid macro_grid_for(int dim, double l, double D, int cells_per_period) {
  if (!(l > 0.0) || !(D > 0.0)) throw ValidationError("l and D must be positive");
  if (cells_per_period < 1) throw ValidationError("cells per period must be positive");
  const double cells = D / l * cells_per_period;
  const int m = static_cast<int>(std::ceil(cells - 1e-9)) + 1;
  return MacroGrid(dim, D, m);
}

/// -div(K(x/l) grad p) = f(x, x/l) + div F(x, x/l) in (0, D)^dim, p = 0 on the boundary.
struct FineProblem {
  CoefficientField field;
  double l = 1.0;
  double D = 16.0;
  TwoScaleSource source;
  int cells_per_period = 16;
  SolveOptions solver{};

  MacroGrid grid() const { return macro_grid_for(field.dim(), l, D, cells_per_period); }

  void check() const {
    if (source.dim() != field.dim()) throw ValidationError("source and field dimensions differ");
    if (D / l < 4.0 - 1e-12) throw ValidationError("domain must span at least 4 periods (D/l >= 4)");
    const auto g = grid();
    if (g.spacing() > l / 8.0 * (1.0 + 1e-12))
      throw ResolutionError("macro spacing " + std::to_string(g.spacing()) + " exceeds l/8 = " +
                            std::to_string(l / 8.0) + "; increase cells per period to at least 8");
  }
};

/// -div(K0 grad p0) = f0 + div F0 in (0, D)^dim, p0 = 0 on the boundary.
struct HomogenizedProblem {
  EffectiveModel model;
  MacroGrid grid;
  SolveOptions solver{};
};

namespace detail {

/// Solves the Dirichlet system on the interior nodes; boundary values stay zero.
inline MacroField solve_dirichlet(const FluxOperator<MacroGrid>& op, const std::vector<double>& rhs,
                                  const SolveOptions& solver) {
  const auto& g = op.grid();
  std::vector<std::ptrdiff_t> dof(g.size(), -1);
  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!g.on_boundary(i)) {
      dof[i] = static_cast<std::ptrdiff_t>(interior.size());
      interior.push_back(i);
    }
  std::vector<double> b(interior.size());
  for (std::size_t k = 0; k < interior.size(); ++k) b[k] = rhs[interior[k]];

  const CsrMatrix A = op.assemble(dof, interior.size());
  std::vector<double> x;
  if (g.dim() == 1) {
    const std::size_t n = interior.size();
    std::vector<double> diag(n), off(n > 0 ? n - 1 : 0);
    for (std::size_t k = 0; k < n; ++k) diag[k] = A.at(k, k);
    for (std::size_t k = 0; k + 1 < n; ++k) off[k] = A.at(k, k + 1);
    x = tridiag_solve(diag, off, b);
  } else {
    SolveOptions opts = solver;
    opts.project_constants = false;
    x = cg_solve(A, b, opts).x;
  }
  std::vector<double> p(g.size(), 0.0);
  for (std::size_t k = 0; k < interior.size(); ++k) p[interior[k]] = x[k];
  return MacroField(g, std::move(p));
}

}  // namespace detail

inline FluxOperator<MacroGrid> fine_operator(const FineProblem& problem) {
  const double l = problem.l;
  const auto& field = problem.field;
  return FluxOperator<MacroGrid>(problem.grid(), [&](const Point& x) { return field({x[0] / l, x[1] / l}); });
}

/// Full load vector of the fine problem, boundary nodes included.
inline std::vector<double> fine_load(const FineProblem& problem, const FluxOperator<MacroGrid>& op) {
  const auto& g = op.grid();
  const double l = problem.l;
  const auto& src = problem.source;
  auto b = op.flux_load(sample_faces(g, [&](const Point& x) { return src.F(x, {x[0] / l, x[1] / l}); }));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.coordinate(i);
    b[i] += g.node_weight(i) * src.f(x, {x[0] / l, x[1] / l});
  }
  return b;
}

inline MacroField solve_fine(const FineProblem& problem) {
  problem.check();
  const auto op = fine_operator(problem);
  return detail::solve_dirichlet(op, fine_load(problem, op), problem.solver);
}

inline FluxOperator<MacroGrid> homogenized_operator(const HomogenizedProblem& problem) {
  const Tensor K0 = problem.model.K0;
  if (K0.asymmetry() > 1e-8 * K0.max_abs() || K0.eigenvalues().first <= 0.0)
    throw ValidationError("effective tensor is not symmetric positive definite");
  return FluxOperator<MacroGrid>(problem.grid, [K0](const Point&) { return K0; });
}

inline std::vector<double> homogenized_load(const HomogenizedProblem& problem, const FluxOperator<MacroGrid>& op) {
  const auto& g = op.grid();
  const auto& m = problem.model;
  auto b = op.flux_load(sample_faces(g, [&](const Point& x) { return m.F0(x); }));
  for (std::size_t i = 0; i < g.size(); ++i) b[i] += g.node_weight(i) * m.f0(g.coordinate(i));
  return b;
}

inline MacroField solve_homogenized(const HomogenizedProblem& problem) {
  const auto op = homogenized_operator(problem);
  return detail::solve_dirichlet(op, homogenized_load(problem, op), problem.solver);
}

/// Net outflow of K grad p + F through the boundary against the total source.
struct FluxBalance {
  double boundary_outflow;
  double source_total;
};

inline FluxBalance flux_balance(const FineProblem& problem, const MacroField& p) {
  const auto op = fine_operator(problem);
  const auto b = fine_load(problem, op);
  const auto Ap = op.apply(p.values());
  const auto& g = op.grid();
  FluxBalance fb{0.0, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.coordinate(i);
    fb.source_total += g.node_weight(i) * problem.source.f(x, {x[0] / problem.l, x[1] / problem.l});
    if (g.on_boundary(i)) fb.boundary_outflow += b[i] - Ap[i];
  }
  return fb;
}

}  // namespace homog
