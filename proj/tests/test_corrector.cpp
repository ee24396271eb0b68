#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "homog/bench.hpp"

using namespace homog;

namespace {

constexpr double pi = std::numbers::pi;

RunSpec example(double D, int c = 16) { return {{"paper1d", 1}, {"paper1d"}, 1.0, D, c, 0, {}}; }

}  // namespace

TEST(AssembleP1, ConstantFieldWithoutMicroSourceIsP0) {
  const auto run = run_two_scale({{"constant", 2, 1.3}, {"unit"}, 1.0, 4.0, 8, 0, {}});
  for (std::size_t i = 0; i < run.p0.size(); ++i) EXPECT_EQ(run.p1[i], run.p0[i]);
}

TEST(AssembleP1, Example1DMatchesClosedForm) {
  const double D = 32.0;
  const auto run = run_two_scale(example(D, 128));
  const AnalyticOracle1D o(1.0, D);
  double err = 0.0;
  for (std::size_t i = 0; i < run.p1.size(); ++i)
    err = std::max(err, std::abs(run.p1[i] - o.p1(run.p1.grid().coordinate(i)[0])));
  EXPECT_LT(err, 1e-6 * D * D);
}

TEST(AssembleP1, DeviationBoundedByCorrectorSize) {
  const double l = 0.5, D = 4.0;
  const auto K = make_tilted_laminate(0.3);
  const auto cell = solve_cell(K, 16);
  TwoScaleSource src("flux", 2);
  src.add_flux_term({[](const Point& x) { return 1.0 + x[0]; },
                     [](const Point& y) { return Vec{std::cos(2 * pi * y[1]), std::sin(2 * pi * y[0])}; }},
                    true);
  src.set_scalar([](const Point&, const Point&) { return 1.0; }, false);
  const auto es = effective_source(cell, src);
  const auto model = make_effective_model(cell, es);
  const auto grid = macro_grid_for(2, l, D, 16);
  const auto p0 = solve_homogenized({model, grid, {}});
  const auto p1 = assemble_p1(p0, cell, es.get(), l);

  const auto grad = gradient(p0);
  double N_max = 0.0, grad_max = 0.0, w_max = 0.0, dev = 0.0;
  for (const auto& N : cell.N)
    for (double v : N.values()) N_max = std::max(N_max, std::abs(v));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grad_max = std::max(grad_max, std::abs(grad.at(i)[0]) + std::abs(grad.at(i)[1]));
    const Point x = grid.coordinate(i);
    w_max = std::max(w_max, std::abs(es->w(x, {x[0] / l, x[1] / l})));
    dev = std::max(dev, std::abs(p1[i] - p0[i]));
  }
  EXPECT_GT(dev, 0.0);
  EXPECT_LE(dev, l * (N_max * grad_max + w_max) * (1 + 1e-12));
}

TEST(Metrics, VanishOnIdenticalFields) {
  const auto g = MacroGrid(2, 3.0, 9);
  const auto p = make_field(g, [](const Point& x) { return std::sin(x[0]) * x[1]; });
  EXPECT_EQ(scaled_l2_error(p, p, 3.0), 0.0);
  EXPECT_EQ(scaled_h1_error(p, p, 3.0), 0.0);
  EXPECT_THROW(scaled_l2_error(p, make_field(MacroGrid(2, 3.0, 5), [](const Point&) { return 0.0; }), 3.0),
               ValidationError);
}

TEST(Metrics, L2KnownValue) {
  // (1/D) int_0^D (x/D^2)^2 dx = 1/(3 D^2) for p - p0 = x
  const double D = 2.0;
  const auto g = MacroGrid(1, D, 2001);
  const auto p = make_field(g, [](const Point& x) { return x[0]; });
  const auto z = make_field(g, [](const Point&) { return 0.0; });
  EXPECT_NEAR(scaled_l2_error(p, z, D), 1.0 / (3 * D * D), 1e-6);
  // |grad(x / D)|^2 = 1/D^2
  EXPECT_NEAR(scaled_h1_error(p, z, D), 1.0 / (D * D), 1e-12);
}

TEST(Metrics, Example1DConstants) {
  for (double D : {32.0, 64.0}) {
    const auto r = run_two_scale(example(D)).report;
    const auto c = predicted_constants(1.0, D);
    EXPECT_NEAR(r.e_L2 / (c.c_L2 / (D * D)), 1.0, 0.05) << D;
    EXPECT_NEAR(r.e_H1 / (c.c_H1 / (D * D)), 1.0, 0.05) << D;
    EXPECT_NEAR(r.e_energy / (c.c_E / (D * D)), 1.0, 0.05) << D;
  }
}

TEST(Metrics, Example1DRates) {
  std::vector<std::pair<double, double>> l2, h1, en;
  for (double D : {32.0, 64.0, 128.0}) {
    const auto r = run_two_scale(example(D)).report;
    l2.emplace_back(r.eps, r.e_L2);
    h1.emplace_back(r.eps, r.e_H1);
    en.emplace_back(r.eps, r.e_energy);
  }
  EXPECT_NEAR(fit_rate(l2).rate, 2.0, 0.1);
  EXPECT_NEAR(fit_rate(h1).rate, 2.0, 0.1);
  EXPECT_NEAR(fit_rate(en).rate, 2.0, 0.2);
}

TEST(Metrics, ConstantFluxShiftInvariance) {
  const std::vector<RunSpec> specs{example(16.0),
                                   {{"tilted_laminate", 2}, {"oscillating"}, 1.0, 4.0, 8, 0, {}},
                                   {{"checkerboard", 2}, {"unit"}, 1.0, 4.0, 8, 0, {}}};
  for (auto spec : specs) {
    const auto a = run_two_scale(spec).report;
    spec.source.flux_shift = {2.5, -1.25};
    const auto b = run_two_scale(spec).report;
    EXPECT_NEAR(a.e_L2, b.e_L2, 1e-8 * std::max(a.e_L2, 1e-30) + 1e-20);
    EXPECT_NEAR(a.e_H1, b.e_H1, 1e-8 * std::max(a.e_H1, 1e-30) + 1e-20);
    EXPECT_NEAR(a.e_energy, b.e_energy, 1e-8 * std::max(std::abs(a.E), 1.0));
  }
}

TEST(Metrics, UnitIndependence) {
  const auto a = run_two_scale({{"paper1d", 1}, {"paper1d"}, 1.0, 32.0, 16, 0, {}}).report;
  const auto b = run_two_scale({{"paper1d", 1}, {"paper1d"}, 2.5, 80.0, 16, 0, {}}).report;
  EXPECT_NEAR(a.e_L2, b.e_L2, 1e-10 * a.e_L2);
  EXPECT_NEAR(a.e_H1, b.e_H1, 1e-10 * a.e_H1);
  EXPECT_NEAR(a.e_energy, b.e_energy, 1e-7 * a.e_energy);
}

TEST(Metrics, CorrectorImprovesH1OnCatalog) {
  for (const auto& spec : catalog_specs()) {
    if (spec.name == "constant") continue;
    const auto r = run_two_scale({spec, {"unit"}, 1.0, 8.0, 8, 0, {}}).report;
    EXPECT_LT(r.e_H1, r.e_H1_p0) << spec.name;
  }
}

TEST(EnergyGap, ConstantCoefficientOnlyDiscretization) {
  const auto r = run_two_scale({{"constant", 2, 2.0}, {"unit"}, 1.0, 4.0, 8, 0, {}}).report;
  EXPECT_LT(r.e_energy, 1e-10 * std::abs(r.E));
  EXPECT_LT(r.e_L2, 1e-20);
}

TEST(EnergyGap, Example1DMatchesClosedForm) {
  const double D = 48.0;
  const auto r = run_two_scale(example(D, 32)).report;
  const AnalyticOracle1D o(1.0, D);
  EXPECT_NEAR(r.E0, o.energy0(), 1e-6);
  EXPECT_NEAR(r.e_energy / o.energy_gap(), 1.0, 0.01);
}
