#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <utility>
#include <vector>

#include "homog/discretization.hpp"
#include "homog/errors.hpp"
#include "homog/fields.hpp"
#include "homog/grid.hpp"
#include "homog/linalg.hpp"

namespace homog {

using CellField = ScalarField<UnitCellGrid>;

/// The periodic operator -div_y(K grad_y .) on an n^dim cell grid, assembled once and reused for
/// every cell right-hand side.
class CellProblem {
 public:
  CellProblem(CoefficientField field, int n, SolveOptions options = {})
      : field_(std::move(field)),
        grid_(field_.dim(), n),
        op_(grid_, [this](const Point& y) { return field_(y); }),
        options_(std::move(options)) {
    if (n < 8) throw ValidationError("cell problems need n >= 8");
    options_.project_constants = true;
    std::vector<std::ptrdiff_t> dof(grid_.size());
    std::iota(dof.begin(), dof.end(), std::ptrdiff_t{0});
    matrix_ = op_.assemble(dof, grid_.size());
  }

  const CoefficientField& field() const noexcept { return field_; }
  const UnitCellGrid& grid() const noexcept { return grid_; }
  const FluxOperator<UnitCellGrid>& op() const noexcept { return op_; }
  const SolveOptions& options() const noexcept { return options_; }

  struct Solved {
    CellField u;
    double relative_residual;
    double rhs_norm;
  };

  /// Zero-mean periodic solution of A u = rhs (rhs is projected onto mean-free vectors).
  Solved solve(std::span<const double> rhs) const {
    const auto r = cg_solve(matrix_, rhs, options_);
    std::vector<double> b(rhs.begin(), rhs.end());
    detail::remove_mean(b);
    return {CellField(grid_, r.x), r.relative_residual, std::sqrt(detail::dot(b, b))};
  }

  /// N^axis: -div(K grad N) = div(K e_axis).
  Solved corrector(int axis) const {
    Vec e{0.0, 0.0};
    e[axis] = 1.0;
    return solve(op_.affine_load(e));
  }

  /// w for a periodic flux profile: -div(K grad w) = div F.
  Solved flux_corrector(const std::function<Vec(const Point&)>& F) const {
    return solve(op_.flux_load(sample_faces(grid_, F)));
  }

  /// Face-quadrature mean of a periodic flux profile, <F>_Y.
  Vec mean(const std::function<Vec(const Point&)>& F) const {
    const auto faces = sample_faces(grid_, F);
    return {integrate(faces, 0), grid_.dim() == 2 ? integrate(faces, 1) : 0.0};
  }

 private:
  CoefficientField field_;
  UnitCellGrid grid_;
  FluxOperator<UnitCellGrid> op_;
  SolveOptions options_;
  CsrMatrix matrix_;
};

/// Zero-mean periodic correctors N^1..N^dim on the unit cell.
struct CellSolution {
  std::shared_ptr<const CellProblem> problem;
  std::vector<CellField> N;
  std::vector<double> residuals;
  std::vector<double> rhs_norms;

  int n() const noexcept { return problem->grid().nodes_per_axis(); }
  const CoefficientField& field() const noexcept { return problem->field(); }
};

inline CellSolution solve_cell(const CoefficientField& field, int n, const SolveOptions& options = {}) {
  CellSolution cell{std::make_shared<const CellProblem>(field, n, options), {}, {}, {}};
  for (int j = 0; j < field.dim(); ++j) {
    auto s = cell.problem->corrector(j);
    cell.N.push_back(std::move(s.u));
    cell.residuals.push_back(s.relative_residual);
    cell.rhs_norms.push_back(s.rhs_norm);
  }
  return cell;
}

/// Single corrector N^axis.
inline CellField solve_corrector(const CoefficientField& field, int n, int axis, const SolveOptions& options = {}) {
  if (axis < 0 || axis >= field.dim()) throw ValidationError("corrector axis out of range");
  return CellProblem(field, n, options).corrector(axis).u;
}

/// K0_ij = <K (e_j + grad N^j)>_i, evaluated with the scheme's own face quadrature.
inline Tensor effective_tensor(const CellSolution& cell) {
  const auto& op = cell.problem->op();
  const int d = cell.field().dim();
  Tensor K0(d);
  for (int j = 0; j < d; ++j) {
    Vec e{0.0, 0.0};
    e[j] = 1.0;
    const Vec q = op.mean_flux(cell.N[j].values(), e);
    for (int i = 0; i < d; ++i) K0(i, j) = q[i];
  }
  return K0;
}

inline Tensor effective_tensor(const CoefficientField& field, const CellSolution& cell) {
  if (field.name() != cell.field().name() || field.dim() != cell.field().dim())
    throw ValidationError("cell solution was computed for a different field");
  return effective_tensor(cell);
}

/// Discrete arithmetic (Voigt) and harmonic (Reuss) averages bracketing K0.
struct Bounds {
  Tensor arithmetic;
  Tensor harmonic;
};

inline Bounds voigt_reuss(const CellProblem& problem) {
  const auto& op = problem.op();
  const auto& g = problem.grid();
  const int d = g.dim();
  Bounds b{Tensor(d), Tensor(d)};
  for (int a = 0; a < d; ++a) {
    Vec e{0.0, 0.0};
    e[a] = 1.0;
    const Vec q = op.mean_flux({}, e);
    for (int i = 0; i < d; ++i) b.arithmetic(i, a) = q[i];
  }
  if (!op.has_off_diagonal()) {
    // constant fluxes are admissible in the complementary principle, so face harmonic means bound K0 below
    for (int a = 0; a < d; ++a) {
      double s = 0.0;
      const auto k = op.face_coefficient(a);
      for (std::size_t i = 0; i < g.size(); ++i) s += g.face_weight(a, i) / k[i];
      b.harmonic(a, a) = 1.0 / s;
    }
  } else {
    Tensor mean_inverse(d);
    for (std::size_t i = 0; i < g.size(); ++i) mean_inverse += g.cell_weight(i) * problem.field()(g.cell_center(i)).inverse();
    b.harmonic = mean_inverse.inverse();
  }
  return b;
}

/// True when harmonic <= K0 <= arithmetic as quadratic forms, up to tol.
inline bool within_bounds(const Tensor& K0, const Bounds& b, double tol) {
  return (K0 - b.harmonic).eigenvalues().first >= -tol && (b.arithmetic - K0).eigenvalues().first >= -tol;
}

struct MassBalance {
  double defect;       // |<K grad p_eta> - K0 eta|
  Vec mean_flux;       // <K grad p_eta>
  Vec mean_gradient;   // <grad p_eta>, equals eta
};

/// Solves for p_eta with p_eta - eta . y periodic and compares its mean flux with K0 eta.
inline MassBalance mass_balance_check(const CoefficientField& field, int n, const Vec& eta,
                                      const SolveOptions& options = {}) {
  const double norm = std::hypot(eta[0], field.dim() == 2 ? eta[1] : 0.0);
  if (std::abs(norm - 1.0) > 1e-12) throw ValidationError("mass balance direction must be a unit vector");
  const auto cell = solve_cell(field, n, options);
  const Tensor K0 = effective_tensor(cell);
  const auto& problem = *cell.problem;
  const auto q = problem.solve(problem.op().affine_load(eta)).u;

  MassBalance mb{};
  mb.mean_flux = problem.op().mean_flux(q.values(), eta);
  const auto g = problem.op().gradients(q.values(), eta);
  const auto& grid = problem.grid();
  for (int a = 0; a < grid.dim(); ++a)
    for (std::size_t i = 0; i < grid.size(); ++i) mb.mean_gradient[a] += grid.face_weight(a, i) * g.face[a][i];
  const Vec k0eta = K0.apply(eta);
  mb.defect = std::hypot(mb.mean_flux[0] - k0eta[0], mb.mean_flux[1] - k0eta[1]);
  return mb;
}

/// w(x, .) for the flux F(x, .) at one macro point.
inline CellField solve_source_corrector(const CoefficientField& field, const TwoScaleSource& source, int n,
                                        const Point& x, const SolveOptions& options = {}) {
  CellProblem problem(field, n, options);
  return problem.flux_corrector([&](const Point& y) { return source.F(x, y); }).u;
}

/// Source correctors w(x, y) and the effective source terms f0(x), F0(x).
///
/// Separable flux terms g(x) Phi(y) need one cell solve each (w = g w_hat); a general flux part is
/// solved per macro point and cached.
class EffectiveSource {
 public:
  EffectiveSource(const CellSolution& cell, TwoScaleSource source) : cell_(cell), source_(std::move(source)) {
    const auto& problem = *cell_.problem;
    for (const auto& term : source_.flux_terms()) {
      auto s = problem.flux_corrector(term.profile);
      Vec mean = problem.mean(term.profile);
      const Vec q = problem.op().mean_flux(s.u.values(), {0.0, 0.0});
      separable_.push_back({s.u, {mean[0] + q[0], mean[1] + q[1]}});
      cross_check(term.profile, s, {mean[0] + q[0], mean[1] + q[1]});
    }
  }

  /// f0(x) = <f(x, .)>_Y.
  double f0(const Point& x) const {
    if (!source_.has_micro_f()) return source_.f(x, {0.0, 0.0});
    const auto& g = cell_.problem->grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.node_weight(i) * source_.f(x, g.coordinate(i));
    return s;
  }

  /// F0(x) = <F(x, .) + K grad_y w(x, .)>_Y.
  Vec F0(const Point& x) const {
    Vec r{0.0, 0.0};
    const auto& terms = source_.flux_terms();
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const double g = terms[t].amplitude(x);
      r[0] += g * separable_[t].flux_mean[0];
      r[1] += g * separable_[t].flux_mean[1];
    }
    if (source_.general_flux()) {
      const auto& e = general_entry(x);
      r[0] += e.flux_mean[0];
      r[1] += e.flux_mean[1];
    }
    return r;
  }

  /// w(x, y), interpolated from the cell grid.
  double w(const Point& x, const Point& y) const {
    double s = 0.0;
    const auto& terms = source_.flux_terms();
    for (std::size_t t = 0; t < terms.size(); ++t)
      s += terms[t].amplitude(x) * interpolate_periodic(separable_[t].w_hat, y);
    if (source_.general_flux()) s += interpolate_periodic(general_entry(x).w_hat, y);
    return s;
  }

  bool has_corrector() const noexcept { return source_.has_flux(); }
  const TwoScaleSource& source() const noexcept { return source_; }
  const CellSolution& cell() const noexcept { return cell_; }

 private:
  struct Entry {
    CellField w_hat;
    Vec flux_mean;
  };

  const Entry& general_entry(const Point& x) const {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(x[0], x[1]);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const auto& problem = *cell_.problem;
    const std::function<Vec(const Point&)> F = [&](const Point& y) {
      const Vec v = source_.general_flux()(x, y);
      return v;
    };
    auto s = problem.flux_corrector(F);
    const Vec mean = problem.mean(F);
    const Vec q = problem.op().mean_flux(s.u.values(), {0.0, 0.0});
    const Vec total{mean[0] + q[0], mean[1] + q[1]};
    cross_check(F, s, total);
    return cache_.emplace(key, Entry{s.u, total}).first->second;
  }

  /// F0_i must also equal <F . (e_i + grad N^i)>; the two agree up to the cell solves' residuals.
  void cross_check(const std::function<Vec(const Point&)>& F, const CellProblem::Solved& w, const Vec& F0) const {
    const auto& problem = *cell_.problem;
    const auto& g = problem.grid();
    const auto faces = sample_faces(g, F);
    const double tol = problem.options().rel_tol;
    const double w_norm = std::sqrt(detail::dot(w.u.values(), w.u.values()));
    for (int i = 0; i < g.dim(); ++i) {
      const auto dN = face_gradient(cell_.N[i]);
      double alt = 0.0;
      for (int k = 0; k < g.dim(); ++k) {
        const auto Fk = faces.component(k);
        const auto Dk = dN.component(k);
        for (std::size_t n = 0; n < g.size(); ++n) alt += g.face_weight(k, n) * Fk[n] * ((k == i ? 1.0 : 0.0) + Dk[n]);
      }
      const double N_norm = std::sqrt(detail::dot(cell_.N[i].values(), cell_.N[i].values()));
      const double bound = 10.0 * tol * (w.rhs_norm * N_norm + cell_.rhs_norms[i] * w_norm) +
                           1e-12 * (std::abs(alt) + std::abs(F0[i]) + 1.0);
      if (std::abs(alt - F0[i]) > bound)
        throw CrossCheckFailure("effective flux cross-check failed on axis " + std::to_string(i) + ": " +
                                std::to_string(F0[i]) + " vs " + std::to_string(alt));
    }
  }

  CellSolution cell_;
  TwoScaleSource source_;
  std::vector<Entry> separable_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<double, double>, Entry> cache_;
};

/// Effective model: K0 plus effective sources.
struct EffectiveModel {
  Tensor K0;
  std::function<double(const Point&)> f0;
  std::function<Vec(const Point&)> F0;
  double lambda = 0.0;
  double Lambda = 0.0;
  int n = 0;
  std::vector<double> residuals;
};

/// f0 and F0 from the two-scale source and its correctors.
inline std::shared_ptr<const EffectiveSource> effective_source(const CellSolution& cell, const TwoScaleSource& source) {
  return std::make_shared<const EffectiveSource>(cell, source);
}

inline EffectiveModel make_effective_model(const CellSolution& cell,
                                           std::shared_ptr<const EffectiveSource> sources = nullptr) {
  EffectiveModel m;
  m.K0 = effective_tensor(cell);
  m.lambda = cell.field().lambda();
  m.Lambda = cell.field().Lambda();
  m.n = cell.n();
  m.residuals = cell.residuals;
  if (sources) {
    m.f0 = [sources](const Point& x) { return sources->f0(x); };
    m.F0 = [sources](const Point& x) { return sources->F0(x); };
  } else {
    m.f0 = [](const Point&) { return 0.0; };
    m.F0 = [](const Point&) { return Vec{0.0, 0.0}; };
  }
  return m;
}

}  // namespace homog
