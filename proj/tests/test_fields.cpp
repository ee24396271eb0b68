#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "homog/fields.hpp"

using namespace homog;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Paper1D, ValuesAtKeyPoints) {
  const auto K = make_cosine_1d();
  EXPECT_NEAR(K({0.0, 0.0})(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(K({0.5, 0.0})(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(K({0.25, 0.0})(0, 0), 0.5, 1e-15);
}

TEST(Paper1D, Periodic) {
  const auto K = make_cosine_1d();
  for (double y : {0.1, 0.37, 0.9}) {
    EXPECT_NEAR(K({y, 0.0})(0, 0), K({y + 1.0, 0.0})(0, 0), 1e-14);
    EXPECT_NEAR(K({y, 0.0})(0, 0), K({y - 3.0, 0.0})(0, 0), 1e-14);
  }
}

TEST(Laminate, ConstantProfileGivesScaledIdentity) {
  const Profile two{[](double) { return 2.0; }, 2.0, 2.0};
  const auto K = make_laminate(two);
  for (double a : {0.0, 0.3, 0.8}) {
    const Tensor k = K({a, 1.0 - a});
    EXPECT_EQ(k(0, 0), 2.0);
    EXPECT_EQ(k(1, 1), 2.0);
    EXPECT_EQ(k(0, 1), 0.0);
  }
}

TEST(Laminate, PaperProfile) {
  const auto K = make_laminate(cosine_profile());
  for (double y2 : {0.0, 0.4, 0.77}) {
    const Tensor k = K({0.0, y2});
    EXPECT_NEAR(k(0, 0), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(k(1, 1), 1.0 / 3.0, 1e-15);
  }
  const auto est = validate(K, 64);
  EXPECT_GE(est.lambda_est, 1.0 / 3.0 - 1e-12);
  EXPECT_LE(est.Lambda_est, 1.0 + 1e-12);
}

TEST(Validate, Paper1DExtrema) {
  const auto est = validate(make_cosine_1d(), 256);
  EXPECT_NEAR(est.lambda_est, 1.0 / 3.0, 1e-3);
  EXPECT_NEAR(est.Lambda_est, 1.0, 1e-3);
}

TEST(Validate, ConstantField) {
  const auto est = validate(make_constant(2, 2.0), 16);
  EXPECT_DOUBLE_EQ(est.lambda_est, 2.0);
  EXPECT_DOUBLE_EQ(est.Lambda_est, 2.0);
}

TEST(Validate, AsymmetricFieldRejected) {
  const CoefficientField bad(
      "skew", 2,
      [](const Point&) {
        Tensor t = Tensor::identity(2, 1.0);
        t(0, 1) = 0.1;
        return t;
      },
      0.5, 2.0);
  EXPECT_THROW(validate(bad, 8), EllipticityViolation);
}

TEST(Validate, DeclaredBoundsMustHold) {
  const CoefficientField liar("liar", 1, [](const Point& y) { return Tensor::identity(1, 1.0 + y[0]); }, 1.0, 1.5);
  EXPECT_THROW(validate(liar, 16), EllipticityViolation);
  EXPECT_THROW(CoefficientField("bad", 1, [](const Point&) { return Tensor::identity(1, 1.0); }, 0.0, 1.0),
               ValidationError);
}

TEST(Catalog, EveryFieldValidatesConsistently) {
  for (const auto& spec : catalog_specs()) {
    const auto K = make_coefficient(spec);
    const auto a = validate(K, 64);
    const auto b = validate(K, 128);
    EXPECT_LT(std::abs(a.lambda_est - b.lambda_est), 1e-2) << K.name();
    EXPECT_LT(std::abs(a.Lambda_est - b.Lambda_est), 1e-2) << K.name();
  }
}

TEST(Catalog, UnknownNameRejected) {
  EXPECT_THROW(make_coefficient({"marble", 2}), ValidationError);
  EXPECT_THROW(make_coefficient({"paper1d", 2}), ValidationError);
}

TEST(Catalog, TiltedLaminateIsSymmetricAnisotropic) {
  const auto K = make_tilted_laminate(0.5);
  const Tensor k = K({0.25, 0.6});
  EXPECT_NEAR(k(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(k(0, 1), 0.25, 1e-15);
  EXPECT_EQ(k(0, 1), k(1, 0));
  EXPECT_THROW(make_tilted_laminate(1.0), ValidationError);
}

TEST(Catalog, CheckerboardInterfacesAverage) {
  const auto K = make_checkerboard(3.0);
  EXPECT_EQ(K({0.25, 0.25})(0, 0), 1.0);
  EXPECT_EQ(K({0.75, 0.25})(0, 0), 3.0);
  EXPECT_EQ(K({0.5, 0.25})(0, 0), 2.0);
  EXPECT_EQ(K({0.5, 0.5})(0, 0), 2.0);
  EXPECT_TRUE(K.discontinuous());
}

TEST(CoefficientField, ScaledAndPermuted) {
  const auto K = make_tilted_laminate(0.3);
  const auto S = K.scaled(2.0);
  EXPECT_NEAR(S({0.1, 0.2})(0, 1), 2.0 * K({0.1, 0.2})(0, 1), 1e-15);
  EXPECT_DOUBLE_EQ(S.lambda(), 2.0 * K.lambda());
  const auto P = K.permuted();
  EXPECT_NEAR(P({0.2, 0.1})(1, 1), K({0.1, 0.2})(0, 0), 1e-15);
  EXPECT_NEAR(P({0.2, 0.1})(0, 0), K({0.1, 0.2})(1, 1), 1e-15);
  EXPECT_THROW(make_cosine_1d().permuted(), ValidationError);
}

TEST(TwoScaleSource, PeriodicInFastVariable) {
  for (const auto& name : source_names()) {
    const int dim = name == "paper1d" ? 1 : 2;
    const auto s = make_source({name, {0.0, 0.0}}, dim, 1.0, 8.0);
    for (const Point x : {Point{0.3, 1.1}, Point{2.0, 0.5}})
      for (const Point y : {Point{0.2, 0.7}, Point{0.55, 0.05}}) {
        EXPECT_NEAR(s.f(x, y), s.f(x, {y[0] + 1.0, y[1]}), 1e-12);
        EXPECT_NEAR(s.f(x, y), s.f(x, {y[0], y[1] - 1.0}), 1e-12);
        EXPECT_NEAR(s.F(x, y)[0], s.F(x, {y[0] + 1.0, y[1] + 1.0})[0], 1e-12);
      }
  }
}

TEST(TwoScaleSource, Example1DSource) {
  const double l = 1.0, D = 32.0;
  const auto s = make_example1d_source(l, D);
  EXPECT_NEAR(example1d_offset(l, D), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(s.f({3.0, 0.0}, {0.4, 0.0}), -1.0);
  const double x = 5.0;
  EXPECT_NEAR(s.F({x, 0.0}, {0.25, 0.0})[0], (x + D / 2) * 0.5, 1e-12);
  EXPECT_TRUE(s.has_micro_F());
  EXPECT_FALSE(s.has_micro_f());
}

TEST(TwoScaleSource, OffsetForNonIntegerRatio) {
  const double l = 1.0, D = 33.5;
  const double s = l / (2 * pi);
  // sin(2 pi 33.5) = 0 and cos = -1, so C = -2 s^2 / D
  EXPECT_NEAR(example1d_offset(l, D), -2.0 * s * s / D, 1e-12);
}

TEST(TwoScaleSource, ShiftAddsConstantFlux) {
  const auto s = make_unit_source(2).shifted({1.5, -2.0});
  const auto F = s.F({0.3, 0.4}, {0.1, 0.9});
  EXPECT_DOUBLE_EQ(F[0], 1.5);
  EXPECT_DOUBLE_EQ(F[1], -2.0);
  EXPECT_THROW(make_source({"paper1d", {0.0, 0.0}}, 2, 1.0, 8.0), ValidationError);
  EXPECT_THROW(make_source({"plume", {0.0, 0.0}}, 1, 1.0, 8.0), ValidationError);
}
