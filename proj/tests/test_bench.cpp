#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "homog/bench.hpp"

using namespace homog;

namespace {

constexpr double pi = std::numbers::pi;

// Composite Simpson on [a, b].
template <class Fn>
double simpson(Fn&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// E(p) = (1/D^3) int (K p'^2 + F p') from the closed forms, by plain quadrature.
double energy_by_quadrature(double l, double D) {
  const AnalyticOracle1D o(l, D);
  const double C = o.C();
  return simpson(
             [&](double x) {
               const double K = 1.0 / (2.0 + std::cos(2 * pi * x / l));
               const double dp = o.dp(x);
               return K * dp * dp + (x + D / 2 + C) * K * dp;
             },
             0.0, D, 200000) /
         (D * D * D);
}

}  // namespace

TEST(Oracle, BoundaryValues) {
  for (double D : {8.0, 32.0, 33.5, 17.3}) {
    EXPECT_NEAR(oracle_eval(0.0, 1.0, D).p, 0.0, 1e-12 * D * D);
    EXPECT_NEAR(oracle_eval(D, 1.0, D).p, 0.0, 1e-12 * D * D);
    EXPECT_NEAR(oracle_eval(D, 1.0, D).p0, 0.0, 1e-12 * D * D);
  }
  EXPECT_THROW(oracle_eval(-0.1, 1.0, 8.0), ValidationError);
  EXPECT_THROW(oracle_eval(8.5, 1.0, 8.0), ValidationError);
}

TEST(Oracle, OffsetVanishesForIntegerRatio) {
  EXPECT_NEAR(AnalyticOracle1D(1.0, 32.0).C(), 0.0, 1e-14);
  EXPECT_NEAR(AnalyticOracle1D(0.5, 8.0).C(), 0.0, 1e-14);
  EXPECT_NE(AnalyticOracle1D(1.0, 33.5).C(), 0.0);
  EXPECT_TRUE(AnalyticOracle1D(1.0, 32.0).integer_ratio());
  EXPECT_FALSE(AnalyticOracle1D(1.0, 33.5).integer_ratio());
}

TEST(Oracle, DerivativesMatchFiniteDifferences) {
  const AnalyticOracle1D o(1.0, 33.5);
  const double h = 1e-5;
  for (double x : {0.3, 5.1, 20.0}) {
    EXPECT_NEAR(o.dp(x), (o.p(x + h) - o.p(x - h)) / (2 * h), 1e-6);
    EXPECT_NEAR(o.dp1(x), (o.p1(x + h) - o.p1(x - h)) / (2 * h), 1e-6);
  }
}

TEST(Oracle, SolvesTheEquation) {
  // -(K p')' = -1 + F' checked pointwise with nested differences
  const double l = 1.0, D = 33.5;
  const AnalyticOracle1D o(l, D);
  const double h = 1e-4;
  auto K = [&](double x) { return 1.0 / (2.0 + std::cos(2 * pi * x / l)); };
  auto F = [&](double x) { return (x + D / 2 + o.C()) * K(x); };
  for (double x : {1.1, 7.7, 16.0}) {
    const double lhs = -(K(x + h / 2) * o.dp(x + h / 2) - K(x - h / 2) * o.dp(x - h / 2)) / h;
    const double rhs = -1.0 + (F(x + h / 2) - F(x - h / 2)) / h;
    EXPECT_NEAR(lhs, rhs, 1e-6);
  }
}

TEST(Oracle, DiscreteResidualIsSecondOrder) {
  const double l = 1.0, D = 8.0;
  auto residual = [&](int c) {
    const FineProblem p{make_cosine_1d(), l, D, make_example1d_source(l, D), c, {}};
    const auto op = fine_operator(p);
    const auto b = fine_load(p, op);
    const auto& g = op.grid();
    const AnalyticOracle1D o(l, D);
    std::vector<double> u(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = o.p(g.coordinate(i)[0]);
    const auto Au = op.apply(u);
    double r = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!g.on_boundary(i)) r = std::max(r, std::abs(Au[i] - b[i]) / g.node_weight(i));
    return r;
  };
  EXPECT_NEAR(std::log2(residual(16) / residual(32)), 2.0, 0.2);
}

TEST(Oracle, SolverErrorIsDiscretizationDominated) {
  for (double D : {8.0, 32.0}) {
    auto err = [&](int c) {
      const FineProblem p{make_cosine_1d(), 1.0, D, make_example1d_source(1.0, D), c, {}};
      const auto u = solve_fine(p);
      const AnalyticOracle1D o(1.0, D);
      double e = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - o.p(u.grid().coordinate(i)[0])));
      return e;
    };
    EXPECT_NEAR(err(16) / err(32), 4.0, 0.4) << D;
  }
}

TEST(Oracle, MidpointAgainstSolvers) {
  const double l = 1.0, D = 32.0;
  const auto run = run_two_scale({{"paper1d", 1}, {"paper1d"}, l, D, 16, 0, {}});
  const auto& g = run.p.grid();
  const std::size_t mid = (g.size() - 1) / 2;
  ASSERT_NEAR(g.coordinate(mid)[0], D / 2, 1e-12);
  const auto o = oracle_eval(D / 2, l, D);
  EXPECT_NEAR(run.p[mid] - run.p0[mid], o.p - o.p0, 5e-3 * D * D);
}

TEST(Oracle, MetricsApproachPredictedConstants) {
  const double D = 128.0;
  const AnalyticOracle1D o(1.0, D);
  const auto c = predicted_constants(1.0, D);
  EXPECT_NEAR(o.l2_metric() / (c.c_L2 / (D * D)), 1.0, 0.01);
  EXPECT_NEAR(o.h1_metric() / (c.c_H1 / (D * D)), 1.0, 0.01);
  EXPECT_NEAR(o.energy_gap() / (c.c_E / (D * D)), 1.0, 1e-9);
}

TEST(Oracle, EnergyClosedFormMatchesQuadrature) {
  for (double D : {16.0, 33.5, 20.2}) {
    const AnalyticOracle1D o(1.0, D);
    EXPECT_NEAR(o.energy(), energy_by_quadrature(1.0, D), 1e-10) << D;
  }
}

TEST(Oracle, GapReadingsOfOffsetTerm) {
  const auto zero = AnalyticOracle1D(1.0, 32.0).gap_offset_readings();
  EXPECT_NEAR(zero[0], 0.0, 1e-15);
  EXPECT_NEAR(zero[1], 0.0, 1e-15);
  const AnalyticOracle1D o(1.0, 33.5);
  const auto r = o.gap_offset_readings();
  EXPECT_NEAR(r[0], o.C() / 67.0, 1e-15);
  EXPECT_NEAR(r[1], o.C() / (33.5 * 33.5), 1e-15);
}

TEST(PredictedConstants, Values) {
  const auto c = predicted_constants(1.0, 16.0);
  EXPECT_NEAR(c.c_L2, 4.2217e-3, 1e-7);
  EXPECT_NEAR(c.c_H1, 1.2665e-2, 1e-6);
  EXPECT_NEAR(c.c_E, 1.0 / (2 * pi * pi), 1e-15);
  const auto c2 = predicted_constants(2.0, 32.0);
  EXPECT_NEAR(c2.c_L2, 4 * c.c_L2, 1e-15);
  EXPECT_NEAR(c2.c_H1, 4 * c.c_H1, 1e-15);
  EXPECT_NEAR(c2.c_E, 4 * c.c_E, 1e-15);
  EXPECT_THROW(predicted_constants(1.0, 33.5), ValidationError);
}

TEST(FitRate, ExactPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (double e : {0.5, 0.25, 0.125, 0.0625}) pts.emplace_back(e, 3.0 * e * e);
  const auto f = fit_rate(pts);
  EXPECT_NEAR(f.rate, 2.0, 1e-12);
  EXPECT_NEAR(f.prefactor, 3.0, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(FitRate, Degenerate) {
  EXPECT_THROW(fit_rate({{0.5, 1.0}, {0.25, 0.5}}), DegenerateFit);
  EXPECT_THROW(fit_rate({{0.5, 1.0}, {0.25, 0.0}, {0.125, 0.1}}), DegenerateFit);
  EXPECT_THROW(fit_rate({{0.5, 1.0}, {0.5, 0.2}, {0.5, 0.1}}), DegenerateFit);
}

TEST(Sweep, PlanValidation) {
  SweepPlan plan;
  plan.field = {"paper1d", 1};
  plan.ratios = {8, 16};
  EXPECT_THROW(run_sweep(plan), ValidationError);
  plan.ratios = {8, 16, 33.5};
  EXPECT_THROW(run_sweep(plan), ValidationError);
  plan.ratios = {2, 4, 8};
  EXPECT_THROW(run_sweep(plan), ValidationError);
}

TEST(Sweep, Example1DPasses) {
  SweepPlan plan;
  plan.field = {"paper1d", 1};
  plan.source = {"paper1d"};
  plan.ratios = {32, 64, 128};
  const auto res = run_sweep(plan, 2);
  ASSERT_EQ(res.verdicts.size(), 3u);
  for (const auto& v : res.verdicts) {
    EXPECT_TRUE(v.pass) << v.expected.metric;
    ASSERT_TRUE(v.fit);
    EXPECT_NEAR(v.fit->rate, 2.0, 0.1);
  }
  EXPECT_NEAR(res.verdicts[0].fit->prefactor, 1.0 / (24 * pi * pi), 0.05 / (24 * pi * pi));
  EXPECT_TRUE(res.pass);
}

TEST(Sweep, FailedPointsAreFlagged) {
  SweepPlan plan;
  plan.field = {"paper1d", 1};
  plan.source = {"paper1d"};
  plan.ratios = {8, 16, 32};
  plan.cells_per_period = 4;
  const auto res = run_sweep(plan, 1);
  ASSERT_EQ(res.points.size(), 3u);
  for (const auto& pt : res.points) {
    EXPECT_FALSE(pt.ok);
    EXPECT_NE(pt.error.find("cells per period"), std::string::npos);
  }
  EXPECT_FALSE(res.pass);
}

TEST(Sweep, DeterministicAcrossWorkerCounts) {
  SweepPlan plan;
  plan.field = {"tilted_laminate", 2};
  plan.source = {"oscillating"};
  plan.ratios = {4, 6, 8};
  plan.cells_per_period = 8;
  const auto a = run_sweep(plan, 1);
  const auto b = run_sweep(plan, 3);
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    EXPECT_EQ(a.points[k].report.e_L2, b.points[k].report.e_L2);
    EXPECT_EQ(a.points[k].report.e_H1, b.points[k].report.e_H1);
    EXPECT_EQ(a.points[k].report.e_energy, b.points[k].report.e_energy);
  }
}

TEST(NegativeNorm, DecaysAtOrderOne) {
  const auto src = make_oscillating_source(1);
  std::vector<std::pair<double, double>> pts;
  for (double eps : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}) pts.emplace_back(eps, negative_norm_surrogate(src, eps));
  EXPECT_NEAR(fit_rate(pts).rate, 1.0, 0.15);
}

TEST(NegativeNorm, SlowSourceHasNoMicroPart) {
  EXPECT_NEAR(negative_norm_surrogate(make_unit_source(1), 1.0 / 8), 0.0, 1e-12);
}
