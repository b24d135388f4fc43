#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ndlab/coefficient_field.hpp"
#include "ndlab/error.hpp"
#include "ndlab/rng.hpp"
#include "ndlab/verify.hpp"

using namespace ndlab;

namespace {

CoefficientExprs make(const char* a11, const char* a12, const char* a22, const char* b1 = "0", const char* b2 = "0",
                      const char* c = "0") {
  return {CoeffExpr::parse(a11), CoeffExpr::parse(a12), CoeffExpr::parse(a22),
          CoeffExpr::parse(b1),  CoeffExpr::parse(b2),  CoeffExpr::parse(c)};
}

// Minimum of the quadratic form over a fine direction sweep.
double sweep_min_quadform(double a11, double a12, double a22) {
  double best = INFINITY;
  for (int k = 0; k < 200000; ++k) {
    const double t = std::numbers::pi * k / 200000.0;
    const double x = std::cos(t), y = std::sin(t);
    best = std::min(best, a11 * x * x + 2 * a12 * x * y + a22 * y * y);
  }
  return best;
}

}  // namespace

TEST(CoefficientField, SamplesBoundaryNodesAtTheirTrace) {
  const DomainGrid g = build_domain(ShapeSpec::disk({0.5, 0.5}, 0.5), 1.0 / 8);
  const CoefficientField f = sample_field(make("1 + x", "0", "1 + y"), 1.0, g);
  ASSERT_EQ(f.size(), g.num_nodes());
  for (std::size_t k = 0; k < g.num_nodes(); ++k) {
    const Point p = g.is_interior(k) ? g.nodes()[k].pos : g.nodes()[k].trace;
    EXPECT_EQ(f.a11[static_cast<Eigen::Index>(k)], 1 + p.x);
  }
  EXPECT_TRUE(f.exprs.has_value());
}

TEST(CoefficientField, RejectsPositiveZerothOrderAndNonFiniteValues) {
  const DomainGrid g = build_domain(ShapeSpec::unit_square(), 1.0 / 4);
  EXPECT_THROW(sample_field(make("1", "0", "1", "0", "0", "0.5"), 1.0, g), Error);
  EXPECT_THROW(sample_field(make("1/(x - 0.5)", "0", "1"), 1.0, g), Error);
}

TEST(CoefficientField, FromSamplesRequiresSymmetry) {
  const Vector one = Vector::Ones(3), zero = Vector::Zero(3);
  Vector a21 = zero;
  a21[1] = 0.1;
  try {
    field_from_samples(one, zero, a21, one, zero, zero, zero, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AsymmetricInput);
  }
  EXPECT_NO_THROW(field_from_samples(one, zero, zero, one, zero, zero, zero, 1.0));
}

TEST(CoefficientField, MinEigenvalueAgreesWithDirectionSweep) {
  CounterRng rng(3, "eig");
  for (int k = 0; k < 20; ++k) {
    const double a11 = rng.uniform(0.5, 3), a22 = rng.uniform(0.5, 3), a12 = rng.uniform(-1, 1);
    EXPECT_NEAR(min_eigenvalue(a11, a12, a22), sweep_min_quadform(a11, a12, a22), 1e-9);
  }
  EXPECT_NEAR(min_eigenvalue(2, 0.5, 1), 1.5 - std::sqrt(0.5), 1e-15);
}

TEST(CoefficientField, EllipticityCertificate) {
  const DomainGrid g = build_domain(ShapeSpec::unit_square(), 1.0 / 8);
  const auto ok = check_ellipticity(sample_field(make("2", "0.5", "1"), 0.75, g), g);
  EXPECT_TRUE(ok.pass);
  EXPECT_NEAR(ok.min_eigenvalue, 1.5 - std::sqrt(0.5), 1e-14);
  EXPECT_GE(ok.min_quadform, ok.min_eigenvalue - 1e-12);
  const auto bad = check_ellipticity(sample_field(make("2", "0.5", "1"), 0.9, g), g);
  EXPECT_FALSE(bad.pass);
  EXPECT_THROW(check_ellipticity(sample_field(make("1", "0", "1"), 1.0, g), g, 4), Error);
}

TEST(CoefficientField, BlendWeight) {
  EXPECT_EQ(blend_weight(0.0, 0.25), 1.0);
  EXPECT_EQ(blend_weight(0.25, 0.25), 0.0);
  EXPECT_EQ(blend_weight(1.0, 0.25), 0.0);
  EXPECT_NEAR(blend_weight(0.125, 0.25), 0.5, 1e-15);
  double prev = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double w = blend_weight(0.25 * k / 100.0, 0.25);
    EXPECT_LE(w, prev);
    prev = w;
  }
}

TEST(CoefficientField, ExtensionCopiesDomainValuesAndStaysElliptic) {
  const DomainGrid g = build_domain(ShapeSpec::l_shape(), 1.0 / 16);
  const CoefficientField f = sample_field(make("1 + x^2/2", "x*y/4", "1 + y^2/2", "3", "-1", "-2"), 0.75, g);
  const EnclosingBall ball = enclosing_ball(g, 0.5);
  const CoefficientField e = extend_to_ball(f, g, ball, ExtensionRecipe{0.25});
  std::vector<char> mapped(e.size(), 0);
  for (std::size_t k = 0; k < g.num_nodes(); ++k) {
    const auto s = static_cast<Eigen::Index>(k);
    const Eigen::Index d = ball.injection[k];
    mapped[static_cast<std::size_t>(d)] = 1;
    EXPECT_EQ(e.a11[d], f.a11[s]);
    EXPECT_EQ(e.a12[d], f.a12[s]);
    EXPECT_EQ(e.c[d], f.c[s]);
  }
  for (std::size_t k = 0; k < e.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    EXPECT_GE(min_eigenvalue(e.a11[i], e.a12[i], e.a22[i]), 0.375 - 1e-12);
    if (!mapped[k]) {
      EXPECT_EQ(e.b1[i], 0.0);
      EXPECT_EQ(e.c[i], 0.0);
    }
  }
  EXPECT_EQ(e.lambda_lower, 0.375);
  try {
    extend_to_ball(f, g, ball, ExtensionRecipe{0.05});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::BlendFailure);
  }
}

TEST(CoefficientField, ExtensionFromSamplesMatchesExpressionClampOnSquare) {
  const DomainGrid g = build_domain(ShapeSpec::unit_square(), 1.0 / 16);
  const CoefficientField f = sample_field(make("2", "0.5", "1"), 0.75, g);
  CoefficientField raw = f;
  raw.exprs.reset();
  const EnclosingBall ball = enclosing_ball(g, 0.5);
  const CoefficientField a = extend_to_ball(f, g, ball, {});
  const CoefficientField b = extend_to_ball(raw, g, ball, {});
  EXPECT_EQ(sup_distance(a, b), 0.0);
}

TEST(CoefficientField, MollifierKernelIsSymmetricUnitMass) {
  for (int k : {4, 8, 16}) {
    const auto taps = mollifier_kernel(MollifierSpec{k}, 1.0 / 64);
    double mass = 0.0, first_x = 0.0, first_y = 0.0;
    for (const auto& t : taps) {
      mass += t.weight;
      first_x += t.weight * t.di;
      first_y += t.weight * t.dj;
      EXPECT_GT(t.weight, 0.0);
      EXPECT_LT(std::hypot(t.di, t.dj) / 64.0 * k, 1.0);
    }
    EXPECT_NEAR(mass, 1.0, 1e-14);
    EXPECT_NEAR(first_x, 0.0, 1e-14);
    EXPECT_NEAR(first_y, 0.0, 1e-14);
  }
}

TEST(CoefficientField, MollifyingAffineFieldAwayFromBoundaryIsExact) {
  // A symmetric unit-mass kernel reproduces affine data.
  const DomainGrid g = build_domain(ShapeSpec::unit_square(), 1.0 / 32);
  const CoefficientField f = sample_field(make("2 + x", "0.1*y", "2"), 1.0, g);
  const EnclosingBall ball = enclosing_ball(g, 0.5);
  const CoefficientField e = extend_to_ball(f, g, ball, {});
  const CoefficientField m = mollify(e, ball, MollifierSpec{8});
  for (std::size_t k = 0; k < g.num_interior(); ++k) {
    const Point p = g.nodes()[k].pos;
    if (p.x < 0.2 || p.x > 0.8 || p.y < 0.2 || p.y > 0.8) continue;
    EXPECT_NEAR(m.a11[static_cast<Eigen::Index>(k)], 2 + p.x, 1e-13);
    EXPECT_NEAR(m.a12[static_cast<Eigen::Index>(k)], 0.1 * p.y, 1e-13);
  }
}

TEST(CoefficientField, MollifyReportsSupportOverrun) {
  const DomainGrid g = build_domain(ShapeSpec::unit_square(), 1.0 / 16);
  const CoefficientField f = sample_field(make("1", "0", "1"), 1.0, g);
  const EnclosingBall ball = enclosing_ball(g, 0.125);
  const CoefficientField e = extend_to_ball(f, g, ball, ExtensionRecipe{0.125});
  try {
    mollify(e, ball, MollifierSpec{2});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::SupportOverrun);
  }
}

TEST(CoefficientField, DivergenceReductionSecondOrderOnNonPolynomialField) {
  const CoefficientExprs e = make("1 + sin(2*x)*y/2", "cos(x + y)/4", "1 + exp(x*y)/3", "1", "-2");
  std::vector<double> errors;
  for (int n : {32, 64, 128}) {
    const DomainGrid g = build_domain(ShapeSpec::unit_square(), 1.0 / n);
    errors.push_back(divergence_reduction_error(sample_field(e, 0.5, g), g, e));
  }
  const OrderEstimate ord = observed_order(errors);
  EXPECT_FALSE(ord.exact);
  EXPECT_GE(ord.order, 1.9);
  EXPECT_LE(ord.order, 2.2);
}

TEST(CoefficientField, DivergenceReductionExactOnQuadratics) {
  const CoefficientExprs e = make("1 + x^2/2", "x*y/4", "1 + y^2/2");
  const DomainGrid g = build_domain(ShapeSpec::l_shape(), 1.0 / 16);
  EXPECT_LE(divergence_reduction_error(sample_field(e, 0.75, g), g, e), 1e-12);
}

TEST(CoefficientField, LipschitzWarningOnSteepCoefficients) {
  const DomainGrid g = build_domain(ShapeSpec::unit_square(), 1.0 / 32);
  const auto steep = divergence_reduction(sample_field(make("1 + 50*abs(x - 1/2)", "0", "1"), 1.0, g), g, 10.0);
  EXPECT_TRUE(steep.lipschitz_warning);
  const auto mild = divergence_reduction(sample_field(make("1 + x", "0", "1"), 1.0, g), g, 10.0);
  EXPECT_FALSE(mild.lipschitz_warning);
  EXPECT_NEAR(mild.b1.maxCoeff(), -1.0, 1e-12);
}

TEST(CoefficientField, MinEigenvalueExactForDiagonalMatrices) {
  const double a = 1.0 + 1e-16 * 2;  // 1 + one ulp
  EXPECT_EQ(min_eigenvalue(a, 0.0, 1.0), 1.0);
  EXPECT_EQ(min_eigenvalue(1.0, 0.0, a), 1.0);
  EXPECT_NEAR(min_eigenvalue(2.0, 1.0, 2.0), 1.0, 1e-15);
  EXPECT_NEAR(min_eigenvalue(0.5, 0.9, 3.0), 1.75 - std::hypot(1.25, 0.9), 1e-15);
  EXPECT_EQ(min_eigenvalue(0.0, 0.0, 0.0), 0.0);
}
