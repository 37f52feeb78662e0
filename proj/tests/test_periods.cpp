#include <gtest/gtest.h>

#include <random>

#include "geolab/enumeration.hpp"
#include "geolab/periods.hpp"
#include "geolab/quadrature.hpp"
#include "test_util.hpp"

using namespace geolab;

namespace {

const AutomorphicForm& delta() {
  static const AutomorphicForm f = AutomorphicForm::delta(20000);
  return f;
}

const AutomorphicForm& maass_odd() {
  static const AutomorphicForm f = ingest_maass_coefficients(bundled_maass_path(Parity::Odd));
  return f;
}

// int_0^inf f(a/c + iy) y^{k/2} dy / y as a plain quadrature in s = log y.
cplx vertical_by_quadrature(const AutomorphicForm& f, std::int64_t a, std::int64_t c) {
  const double x = static_cast<double>(a) / static_cast<double>(c);
  const double lc = std::log(static_cast<double>(c));
  auto F = [&](double s) { return eval_form(f, UpperHalfPlanePoint(x, std::exp(s)), 1e-14); };
  return adaptive_gauss(F, -2.0 * lc - 9.0, 6.0, 1e-13).value;
}

}  // namespace

TEST(GeodesicPeriod, ConstantFormGivesLength) {
  const auto c = AutomorphicForm::constant(3.0);
  const GroupElement g = GroupElement::normalize(2, 1, 1, 1);
  const auto p = geodesic_period(c, g, 1e-10);
  EXPECT_NEAR(p.value.real(), 3.0 * geodesic_length(g), 1e-14);
  EXPECT_EQ(geodesic_period(AutomorphicForm::zero(), g, 1e-10).value, cplx(0.0, 0.0));
}

TEST(GeodesicPeriod, ConjugationAndStartPointInvariance) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 25; ++i) {
    const GroupElement g = rnd::random_hyperbolic(rng, 7);
    if (g.abs_trace() > 400) continue;
    const GroupElement s = rnd::random_word(rng, 5);
    const cplx a = geodesic_period(delta(), g, 1e-10).value;
    EXPECT_LT(std::abs(a - geodesic_period(delta(), s * g * s.inverse(), 1e-10).value), 2e-10);
    EXPECT_LT(std::abs(a - geodesic_period(delta(), g, 1e-10, QuadratureScheme::Gauss, 0.37).value), 2e-10);
  }
}

TEST(GeodesicPeriod, GaussAndSimpsonAgree) {
  const ClassTable table = enumerate_class_table(30);
  for (std::size_t i = 0; i < table.size(); i += 7) {
    const GeodesicClass y = to_class(table.classes[i]);
    for (const auto* f : {&delta(), &maass_odd()}) {
      const cplx a = geodesic_period(*f, y, 1e-11, QuadratureScheme::Gauss).value;
      const cplx b = geodesic_period(*f, y, 1e-11, QuadratureScheme::Simpson).value;
      EXPECT_LT(std::abs(a - b), 1e-9);
    }
  }
}

TEST(GeodesicPeriod, InverseClassConjugatesHolomorphicPeriodSign) {
  // g and g^{-1} trace the same closed geodesic in opposite directions.
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    const GroupElement g = rnd::random_hyperbolic(rng, 6);
    const cplx a = geodesic_period(maass_odd(), g, 1e-10).value;
    const cplx b = geodesic_period(maass_odd(), g.inverse(), 1e-10).value;
    EXPECT_LT(std::abs(a - b), 1e-8);
  }
}

TEST(VerticalPeriod, SeriesMatchesQuadrature) {
  for (auto [a, c] : {std::pair<std::int64_t, std::int64_t>{0, 1}, {1, 2}, {1, 3}, {2, 5}, {3, 7}}) {
    for (const auto* f : {&delta(), &maass_odd()}) {
      const cplx s = vertical_period(*f, a, c, 1e-12).value;
      const cplx q = vertical_by_quadrature(*f, a, c);
      EXPECT_LT(std::abs(s - q), 1e-9) << a << "/" << c;
    }
  }
}

TEST(VerticalPeriod, IndependentOfSplitHeight) {
  const auto eis = AutomorphicForm::eisenstein(1.0, 20000);
  for (const auto* f : {&delta(), &maass_odd(), &eis}) {
    const cplx base = vertical_period(*f, 2, 7, 1e-12).value;
    for (double Y0 : {0.11, 0.13, 0.18}) EXPECT_LT(std::abs(vertical_period(*f, 2, 7, 1e-12, Y0).value - base), 1e-9) << Y0;
  }
}

TEST(VerticalPeriod, BatchMatchesSingle) {
  for (std::int64_t c : {1, 2, 12, 37}) {
    const auto row = vertical_periods_for_denominator(delta(), c, 1e-10);
    std::size_t i = 0;
    for (std::int64_t a = 0; a < c; ++a) {
      if (std::gcd(a, c) != 1) continue;
      ASSERT_LT(i, row.size());
      EXPECT_LT(std::abs(row[i++] - vertical_period(delta(), a, c, 1e-10).value), 1e-10);
    }
    EXPECT_EQ(i, row.size());
  }
}

TEST(VerticalPeriod, Preconditions) {
  EXPECT_THROW(vertical_period(delta(), 2, 4, 1e-9), DomainError);
  EXPECT_THROW(vertical_period(delta(), 1, 0, 1e-9), DomainError);
  EXPECT_THROW(vertical_period(AutomorphicForm::constant(1.0), 0, 1, 1e-9), PreconditionError);
  EXPECT_EQ(vertical_period(AutomorphicForm::zero(), 0, 1, 1e-9).value, cplx(0.0, 0.0));
}

TEST(Bridge, SignConvention) {
  EXPECT_EQ(bridge_sign(12), -1.0);
  EXPECT_EQ(bridge_sign(0), -1.0);
  EXPECT_EQ(bridge_sign(2), 1.0);
  EXPECT_EQ(eisenstein_explicit_terms(delta(), 5), cplx(0.0, 0.0));
}

TEST(Bridge, ResidualShrinksRelativeToPeriodForFlatEdges) {
  // Edges with small c/|tr| have geodesic period close to +L.
  const std::int64_t N = 300;
  const ClassTable table = enumerate_class_table(N);
  const EdgeList E = enumerate_edges(N, table);
  double worst = 0.0;
  int used = 0;
  for (const auto& e : E.edges) {
    const auto& x = E.cosets[e.x];
    if (x.c > 3 || std::abs(E.trace(e)) < 200) continue;
    const BridgeResult b = bridge_residual(delta(), E, e, 1e-10);
    worst = std::max(worst, std::abs(b.residual(1.0)));
    ++used;
  }
  ASSERT_GT(used, 10);
  EXPECT_LT(worst, 0.01);
}

TEST(Bridge, FitRecoversSyntheticPowerLaw) {
  std::vector<double> r, res;
  for (int i = 1; i <= 200; ++i) {
    const double q = 0.001 * i;
    r.push_back(q);
    res.push_back(0.05 + 2.0 * std::pow(q, 0.5));
  }
  const ResidualFit fit = fit_residuals(r, res, 400);
  EXPECT_NEAR(fit.slope, 0.5, 0.02);
  EXPECT_NEAR(fit.K, 0.05, 0.005);
  EXPECT_THROW(fit_residuals({1.0}, {1.0}), PreconditionError);
}
