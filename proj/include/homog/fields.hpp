#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "homog/errors.hpp"
#include "homog/grid.hpp"
#include "homog/tensor.hpp"

namespace homog {

/// Periodic, symmetric, uniformly elliptic coefficient K(y) on the unit cell.
///
/// The evaluator is called with y already reduced to [0,1)^dim. lambda and Lambda are the declared
/// ellipticity bounds; validate() checks them against samples.
class CoefficientField {
 public:
  using Evaluator = std::function<Tensor(const Point&)>;

  CoefficientField(std::string name, int dim, Evaluator evaluator, double lambda, double Lambda,
                   bool discontinuous = false)
      : name_(std::move(name)),
        dim_(dim),
        evaluator_(std::move(evaluator)),
        lambda_(lambda),
        Lambda_(Lambda),
        discontinuous_(discontinuous) {
    check_dim(dim);
    if (!evaluator_) throw ValidationError("coefficient field needs an evaluator");
    if (!(lambda > 0.0) || !(Lambda >= lambda))
      throw ValidationError("ellipticity bounds must satisfy 0 < lambda <= Lambda");
  }

  Tensor operator()(const Point& y) const {
    Point r{y[0] - std::floor(y[0]), dim_ == 2 ? y[1] - std::floor(y[1]) : 0.0};
    return evaluator_(r);
  }

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return dim_; }
  double lambda() const noexcept { return lambda_; }
  double Lambda() const noexcept { return Lambda_; }
  /// Discontinuous fields carry no smoothness guarantee; rate results on them are informational.
  bool discontinuous() const noexcept { return discontinuous_; }

  /// c * K, with bounds scaled accordingly.
  CoefficientField scaled(double c) const {
    if (!(c > 0.0)) throw ValidationError("scale factor must be positive");
    auto eval = evaluator_;
    return CoefficientField(name_ + "*" + std::to_string(c), dim_, [eval, c](const Point& y) { return c * eval(y); },
                            c * lambda_, c * Lambda_, discontinuous_);
  }

  /// Field with the two coordinate axes swapped: K'(y1, y2) = P K(y2, y1) P.
  CoefficientField permuted() const {
    if (dim_ != 2) throw ValidationError("axis permutation needs a 2D field");
    auto eval = evaluator_;
    return CoefficientField(
        name_ + "^T", 2,
        [eval](const Point& y) {
          const Tensor k = eval({y[1], y[0]});
          Tensor p(2);
          p(0, 0) = k(1, 1);
          p(1, 1) = k(0, 0);
          p(0, 1) = k(1, 0);
          p(1, 0) = k(0, 1);
          return p;
        },
        lambda_, Lambda_, discontinuous_);
  }

 private:
  std::string name_;
  int dim_;
  Evaluator evaluator_;
  double lambda_;
  double Lambda_;
  bool discontinuous_;
};

struct EllipticityEstimate {
  double lambda_est;
  double Lambda_est;
};

/// Samples K on the n^dim cell grid and returns the extreme eigenvalues.
///
/// Throws EllipticityViolation on a non-positive eigenvalue, an asymmetric sample, or an estimate
/// that falls outside the declared [lambda, Lambda].
inline EllipticityEstimate validate(const CoefficientField& field, int n) {
  const UnitCellGrid grid(field.dim(), n);
  EllipticityEstimate est{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Tensor k = field(grid.coordinate(i));
    if (k.asymmetry() > 1e-12)
      throw EllipticityViolation(field.name() + ": coefficient is not symmetric at a sample point");
    const auto [lo, hi] = k.eigenvalues();
    if (lo <= 0.0) throw EllipticityViolation(field.name() + ": non-positive eigenvalue at a sample point");
    est.lambda_est = std::min(est.lambda_est, lo);
    est.Lambda_est = std::max(est.Lambda_est, hi);
  }
  constexpr double slack = 1e-9;
  if (est.lambda_est < field.lambda() - slack || est.Lambda_est > field.Lambda() + slack)
    throw EllipticityViolation(field.name() + ": sampled eigenvalues [" + std::to_string(est.lambda_est) + ", " +
                               std::to_string(est.Lambda_est) + "] exceed declared bounds");
  return est;
}

// ---------------------------------------------------------------------------------------------
// Coefficient catalog

inline CoefficientField make_constant(int dim, double value) {
  if (!(value > 0.0)) throw ValidationError("constant coefficient must be positive");
  return CoefficientField("constant", dim, [dim, value](const Point&) { return Tensor::identity(dim, value); }, value,
                          value);
}

/// K(y) = 1 / (2 + cos 2 pi y) in one dimension.
inline CoefficientField make_cosine_1d() {
  return CoefficientField(
      "paper1d", 1,
      [](const Point& y) { return Tensor::identity(1, 1.0 / (2.0 + std::cos(2.0 * std::numbers::pi * y[0]))); },
      1.0 / 3.0, 1.0);
}

/// A positive periodic scalar profile with declared bounds.
struct Profile {
  std::function<double(double)> value;
  double lower;
  double upper;
};

inline Profile cosine_profile() {
  return {[](double t) { return 1.0 / (2.0 + std::cos(2.0 * std::numbers::pi * t)); }, 1.0 / 3.0, 1.0};
}

/// 2D layered medium K(y) = a(y1) I.
inline CoefficientField make_laminate(const Profile& a) {
  constexpr int samples = 1024;
  for (int k = 0; k < samples; ++k)
    if (!(a.value(static_cast<double>(k) / samples) > 0.0))
      throw ValidationError("laminate profile must be positive");
  auto fn = a.value;
  return CoefficientField("laminate", 2, [fn](const Point& y) { return Tensor::identity(2, fn(y[0])); }, a.lower,
                          a.upper);
}

/// K(y) = (2 + cos 2 pi y1)(2 + cos 2 pi y2) / 9 * I, eigenvalues in [1/9, 1].
inline CoefficientField make_separable_cosine() {
  return CoefficientField(
      "separable_cosine", 2,
      [](const Point& y) {
        constexpr double tau = 2.0 * std::numbers::pi;
        return Tensor::identity(2, (2.0 + std::cos(tau * y[0])) * (2.0 + std::cos(tau * y[1])) / 9.0);
      },
      1.0 / 9.0, 1.0);
}

/// Two-phase checkerboard: value 1 where (y1 < 1/2) == (y2 < 1/2), `contrast` elsewhere.
/// Points on an interface line take the mean of the adjacent phases, which keeps grid samples
/// invariant under the reflections of the pattern.
inline CoefficientField make_checkerboard(double contrast) {
  if (!(contrast > 0.0)) throw ValidationError("checkerboard contrast must be positive");
  return CoefficientField(
      "checkerboard", 2,
      [contrast](const Point& y) {
        auto halves = [](double t) -> std::array<int, 2> {
          if (t == 0.0 || t == 0.5) return {0, 1};
          return t < 0.5 ? std::array<int, 2>{0, 0} : std::array<int, 2>{1, 1};
        };
        const auto h0 = halves(y[0]), h1 = halves(y[1]);
        double v = 0.0;
        for (int a : h0)
          for (int b : h1) v += a == b ? 1.0 : contrast;
        return Tensor::identity(2, v / 4.0);
      },
      std::min(1.0, contrast), std::max(1.0, contrast), true);
}

/// Layered medium with a constant anisotropic matrix: K(y) = a(y1) [[1, s], [s, 1]], |s| < 1.
inline CoefficientField make_tilted_laminate(double shear) {
  if (!(std::abs(shear) < 1.0)) throw ValidationError("tilted laminate needs |shear| < 1");
  const Profile a = cosine_profile();
  auto fn = a.value;
  return CoefficientField(
      "tilted_laminate", 2,
      [fn, shear](const Point& y) {
        Tensor t(2);
        const double v = fn(y[0]);
        t(0, 0) = v;
        t(1, 1) = v;
        t(0, 1) = shear * v;
        t(1, 0) = shear * v;
        return t;
      },
      a.lower * (1.0 - std::abs(shear)), a.upper * (1.0 + std::abs(shear)));
}

/// Catalog lookup parameters.
struct FieldSpec {
  std::string name = "paper1d";
  int dim = 1;
  double value = 1.0;     // constant
  double contrast = 3.0;  // checkerboard
  double shear = 0.5;     // tilted_laminate
};

inline const std::vector<std::string>& field_names() {
  static const std::vector<std::string> names{"constant",     "paper1d",      "separable_cosine",
                                              "laminate",     "checkerboard", "tilted_laminate"};
  return names;
}

inline CoefficientField make_coefficient(const FieldSpec& spec) {
  const auto need_2d = [&] {
    if (spec.dim != 2) throw ValidationError("field '" + spec.name + "' is two-dimensional; set dim = 2");
  };
  if (spec.name == "constant") return make_constant(spec.dim, spec.value);
  if (spec.name == "paper1d") {
    if (spec.dim != 1) throw ValidationError("field 'paper1d' is one-dimensional; set dim = 1");
    return make_cosine_1d();
  }
  if (spec.name == "separable_cosine") return need_2d(), make_separable_cosine();
  if (spec.name == "laminate") return need_2d(), make_laminate(cosine_profile());
  if (spec.name == "checkerboard") return need_2d(), make_checkerboard(spec.contrast);
  if (spec.name == "tilted_laminate") return need_2d(), make_tilted_laminate(spec.shear);
  throw ValidationError("unknown field '" + spec.name + "'");
}

/// Every catalog entry with default parameters.
inline std::vector<FieldSpec> catalog_specs() {
  return {{"constant", 1, 2.0}, {"constant", 2, 2.0}, {"paper1d", 1},      {"separable_cosine", 2},
          {"laminate", 2},      {"checkerboard", 2},  {"tilted_laminate", 2}};
}

// ---------------------------------------------------------------------------------------------
// Two-scale sources f(x, y) + div F(x, y)

/// One separable flux term g(x) * Phi(y).
struct FluxTerm {
  std::function<double(const Point&)> amplitude;  // g(x)
  std::function<Vec(const Point&)> profile;       // Phi(y), Y-periodic
};

/// Right-hand side f(x, x/l) + div F(x, x/l), periodic in the fast variable y.
///
/// The flux is the sum of the separable terms plus an optional general part; the general part
/// forces one cell solve per macro point when correctors are needed.
class TwoScaleSource {
 public:
  using Scalar = std::function<double(const Point&, const Point&)>;
  using Flux = std::function<Vec(const Point&, const Point&)>;

  TwoScaleSource(std::string name, int dim) : name_(std::move(name)), dim_(dim) { check_dim(dim); }

  TwoScaleSource& set_scalar(Scalar f, bool micro) {
    scalar_ = std::move(f);
    micro_f_ = micro;
    return *this;
  }
  TwoScaleSource& add_flux_term(FluxTerm term, bool micro) {
    terms_.push_back(std::move(term));
    micro_F_ = micro_F_ || micro;
    return *this;
  }
  TwoScaleSource& set_general_flux(Flux F, bool micro) {
    general_ = std::move(F);
    micro_F_ = micro_F_ || micro;
    return *this;
  }

  /// Copy with a constant vector added to F (divergence-free, so solutions are unchanged).
  TwoScaleSource shifted(const Vec& c) const {
    TwoScaleSource s = *this;
    if (c[0] != 0.0 || c[1] != 0.0)
      s.terms_.push_back({[](const Point&) { return 1.0; }, [c](const Point&) { return c; }});
    return s;
  }

  double f(const Point& x, const Point& y) const { return scalar_ ? scalar_(x, wrap(y)) : 0.0; }

  Vec F(const Point& x, const Point& y) const {
    const Point yr = wrap(y);
    Vec r{0.0, 0.0};
    for (const auto& t : terms_) {
      const double g = t.amplitude(x);
      const Vec p = t.profile(yr);
      r[0] += g * p[0];
      r[1] += g * p[1];
    }
    if (general_) {
      const Vec p = general_(x, yr);
      r[0] += p[0];
      r[1] += p[1];
    }
    return r;
  }

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return dim_; }
  bool has_micro_f() const noexcept { return micro_f_; }
  bool has_micro_F() const noexcept { return micro_F_; }
  bool has_flux() const noexcept { return !terms_.empty() || static_cast<bool>(general_); }
  const std::vector<FluxTerm>& flux_terms() const noexcept { return terms_; }
  const Flux& general_flux() const noexcept { return general_; }

 private:
  Point wrap(const Point& y) const { return {y[0] - std::floor(y[0]), dim_ == 2 ? y[1] - std::floor(y[1]) : 0.0}; }

  std::string name_;
  int dim_;
  Scalar scalar_;
  std::vector<FluxTerm> terms_;
  Flux general_;
  bool micro_f_ = false;
  bool micro_F_ = false;
};

/// Offset C that makes the one-dimensional example satisfy p(D) = 0; zero when D/l is an integer.
inline double example1d_offset(double l, double D) {
  const double s = l / (2.0 * std::numbers::pi);
  const double k = 2.0 * std::numbers::pi / l;
  return s * std::sin(k * D) + s * s / D * std::cos(k * D) - s * s / D;
}

/// Zero right-hand side.
inline TwoScaleSource make_zero_source(int dim) { return TwoScaleSource("none", dim); }

/// f = 1, F = 0.
inline TwoScaleSource make_unit_source(int dim) {
  TwoScaleSource s("unit", dim);
  s.set_scalar([](const Point&, const Point&) { return 1.0; }, false);
  return s;
}

/// f(x, y) = x1 cos(2 pi y1): a scalar source whose cell average vanishes.
inline TwoScaleSource make_oscillating_source(int dim) {
  TwoScaleSource s("oscillating", dim);
  s.set_scalar([](const Point& x, const Point& y) { return x[0] * std::cos(2.0 * std::numbers::pi * y[0]); }, true);
  return s;
}

/// The one-dimensional example: f = -1, F(x, y) = (x + D/2 + C) K(y) with K(y) = 1/(2 + cos 2 pi y).
inline TwoScaleSource make_example1d_source(double l, double D) {
  const double C = example1d_offset(l, D);
  TwoScaleSource s("paper1d", 1);
  s.set_scalar([](const Point&, const Point&) { return -1.0; }, false);
  s.add_flux_term({[D, C](const Point& x) { return x[0] + 0.5 * D + C; },
                   [](const Point& y) { return Vec{1.0 / (2.0 + std::cos(2.0 * std::numbers::pi * y[0])), 0.0}; }},
                  true);
  return s;
}

struct SourceSpec {
  std::string name = "none";
  Vec flux_shift{0.0, 0.0};
};

inline const std::vector<std::string>& source_names() {
  static const std::vector<std::string> names{"none", "unit", "oscillating", "paper1d"};
  return names;
}

inline TwoScaleSource make_source(const SourceSpec& spec, int dim, double l, double D) {
  TwoScaleSource s = [&] {
    if (spec.name == "none") return make_zero_source(dim);
    if (spec.name == "unit") return make_unit_source(dim);
    if (spec.name == "oscillating") return make_oscillating_source(dim);
    if (spec.name == "paper1d") {
      if (dim != 1) throw ValidationError("source 'paper1d' is one-dimensional");
      return make_example1d_source(l, D);
    }
    throw ValidationError("unknown source '" + spec.name + "'");
  }();
  return s.shifted(spec.flux_shift);
}

}  // namespace homog
