#include <gtest/gtest.h>

#include <random>

#include "geolab/harness.hpp"

using namespace geolab;

namespace {

// Fraction of one period of the closed geodesic whose reduction lands in T <= y <= 2T, times its length.
double strip_length_by_orbit(const GeodesicClass& y, double T, int samples) {
  const GeodesicAxis ax = axis(y.canonical_rep);
  const double L = y.length, h = L / samples;
  int inside = 0;
  for (int i = 0; i < samples; ++i) {
    const double yy = reduce_to_fundamental_domain(geodesic_parametrization(ax, (i + 0.5) * h).z).z.y;
    if (yy >= T && yy <= 2.0 * T) ++inside;
  }
  return L * inside / samples;
}

}  // namespace

TEST(Stats, MomentsWeightedAndPlain) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const Moments m = moments(v);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_DOUBLE_EQ(m.variance, 1.25);
  const std::vector<double> w = {0.0, 0.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(moments(v, &w).mean, 3.5);
  EXPECT_DOUBLE_EQ(moments(v, &w).variance, 0.25);
  EXPECT_THROW(moments({}), PreconditionError);
}

TEST(Stats, KsMatchesDirectFormula) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.3, 1.2);
  std::vector<double> v(500);
  for (auto& x : v) x = g(rng);
  std::vector<double> s = v;
  std::sort(s.begin(), s.end());
  double d = 0.0;
  const double n = static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double F = normal_cdf(s[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  EXPECT_NEAR(ks_normal(v), d, 1e-15);
  // Equal weights reproduce the unweighted statistic.
  const std::vector<double> w(v.size(), 2.5);
  EXPECT_NEAR(ks_normal(v, &w), d, 1e-14);
  EXPECT_DOUBLE_EQ(ks_normal({0.0}), 0.5);
}

TEST(Stats, KsOfQuantilesIsSmall) {
  std::vector<double> v;
  const int n = 999;
  // Inverse CDF by bisection.
  for (int i = 1; i <= n; ++i) {
    const double p = static_cast<double>(i) / (n + 1);
    double lo = -10, hi = 10;
    for (int k = 0; k < 100; ++k) (normal_cdf(0.5 * (lo + hi)) < p ? lo : hi) = 0.5 * (lo + hi);
    v.push_back(0.5 * (lo + hi));
  }
  EXPECT_LE(ks_normal(v), 1.0 / (n + 1) + 1e-12);
}

TEST(Stats, BootstrapBandIsOrderedAndSeeded) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<double> v(400);
  for (auto& x : v) x = g(rng);
  const Band a = bootstrap_ks(v, nullptr, 100, 3), b = bootstrap_ks(v, nullptr, 100, 3);
  EXPECT_LE(a.lo, a.hi);
  EXPECT_EQ(a.lo, b.lo);
  EXPECT_EQ(a.hi, b.hi);
  EXPECT_GT(a.hi, 0.0);
  EXPECT_LT(a.hi, 0.2);
  EXPECT_THROW(bootstrap_ks({}, nullptr, 10, 1), PreconditionError);
}

TEST(Stats, LeastSquaresAndHistogram) {
  const LinearFit f = least_squares({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
  const Histogram h = histogram({-5.0, 0.1, 0.2, 9.0}, 4, -1.0, 1.0);
  EXPECT_DOUBLE_EQ(h.mass[0], 0.25);
  EXPECT_DOUBLE_EQ(h.mass[2], 0.5);
  EXPECT_DOUBLE_EQ(h.mass[3], 0.25);
}

TEST(Stats, LogarithmicIntegral) {
  EXPECT_NEAR(logarithmic_integral(10.0), 6.1655995047872979, 1e-12);
  EXPECT_NEAR(logarithmic_integral(1e6) / 78627.549159462181919, 1.0, 1e-13);
  EXPECT_THROW(logarithmic_integral(1.0), DomainError);
}

TEST(Harness, StripLengthsMatchOrbitSampling) {
  const ClassTable table = enumerate_class_table(30);
  for (double T : {1.0, 1.4}) {
    const auto strip = strip_lengths(table, T);
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (!table.classes[i].primitive) continue;
      const GeodesicClass y = to_class(table.classes[i]);
      const int samples = 40000;
      // Each crossing of the strip boundary costs at most one sample.
      EXPECT_NEAR(strip[i], strip_length_by_orbit(y, T, samples), 40.0 * y.length / samples) << i << " T=" << T;
    }
  }
}

TEST(Harness, StripLengthOfClassAgreesWithTable) {
  const ClassTable table = enumerate_class_table(60);
  const auto strip = strip_lengths(table, 1.0);
  for (std::size_t i = 0; i < table.size(); i += 5) {
    const auto& r = table.classes[i];
    if (!r.primitive) continue;
    EXPECT_DOUBLE_EQ(strip[i], strip_length_of_class(QuadForm{r.A, r.B, r.C}, 1.0));
  }
}

TEST(Harness, MassRatioNearVolumeRatio) {
  const ClassTable table = enumerate_class_table(400);
  const auto strip = strip_lengths(table, 1.0);
  const MassReport m = equidistribution_mass_report(table, strip, primitive_indices(table), 1.0);
  EXPECT_NEAR(m.target, 1.5 / std::numbers::pi, 1e-15);
  EXPECT_LT(m.relative_deviation(), 0.05);
  const auto sub = random_length_subset(table, 0.5, 4);
  double part = 0.0, total = 0.0;
  for (std::size_t i : sub) part += length_from_trace(table.classes[i].trace);
  for (std::size_t i : primitive_indices(table)) total += length_from_trace(table.classes[i].trace);
  EXPECT_GE(part, 0.5 * total);
  EXPECT_THROW(equidistribution_mass_report(table, strip, {}, 1.0), PreconditionError);
}

TEST(Harness, CensusIsMonotoneInDelta) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<cplx> P(3000);
  for (auto& p : P) p = {g(rng), g(rng)};
  P[0] = 0.0;
  const auto r = small_period_census(P, 1000, 1.0, {1.0, 0.1, 0.5, 0.25});
  ASSERT_EQ(r.deltas, (std::vector<double>{0.1, 0.25, 0.5, 1.0}));
  EXPECT_EQ(r.indistinguishable_from_zero, 1u);
  for (std::size_t j = 1; j < r.deltas.size(); ++j) {
    EXPECT_LT(r.thresholds[j], r.thresholds[j - 1]);
    EXPECT_LE(r.below[j], r.below[j - 1]);
  }
  for (std::size_t j = 0; j < r.deltas.size(); ++j) EXPECT_EQ(r.below[j] + r.above[j], P.size());
  // Synthetic ladder with counts exactly proportional to N^1.5.
  std::vector<NonvanishingReport> ladder;
  for (std::int64_t N : {100, 400, 1600}) {
    NonvanishingReport x;
    x.N = N;
    x.deltas = {0.25};
    x.below = {static_cast<std::size_t>(std::pow(static_cast<double>(N), 1.5))};
    ladder.push_back(x);
  }
  EXPECT_NEAR(census_exponents(ladder)[0], 1.5, 1e-3);
}

TEST(Harness, ZeroFormIsDegenerate) {
  const auto z = AutomorphicForm::zero();
  const std::vector<cplx> v(100, 0.0);
  const DistributionReport r = distribution_report(z, 100, v, nullptr, 0.0, 1);
  EXPECT_TRUE(r.degenerate);
  const auto c = small_period_census(v, 100, 1.0, {0.25});
  EXPECT_EQ(c.indistinguishable_from_zero, 100u);
}

TEST(Harness, NormalizedSampleIsStandardized) {
  const auto f = AutomorphicForm::delta(20000);
  const DistributionReport r = vertical_clt_report(f, 60, 0, 1, 1e-9);
  EXPECT_EQ(r.samples, totient_sum(60));
  EXPECT_NEAR(r.C_hat * clt_normalizer(f, 60), std::sqrt(r.var_re), 1e-12);
  EXPECT_FALSE(r.degenerate);
  EXPECT_THROW(vertical_clt_report(f, 6000), PreconditionError);
}

TEST(Harness, CountingAndTotients) {
  for (std::int64_t N : {1, 2, 10, 97}) {
    std::uint64_t brute = 0;
    for (std::int64_t c = 1; c <= N; ++c)
      for (std::int64_t a = 0; a < c; ++a)
        if (std::gcd(a, c) == 1) ++brute;
    EXPECT_EQ(totient_sum(N), brute) << N;
  }
  const CountingReport r = counting_report(200, true);
  EXPECT_EQ(r.cosets, r.phi_sum);
  EXPECT_LE(r.primitive_classes, r.classes);
  EXPECT_NEAR(r.coset_density, 3.0 / (std::numbers::pi * std::numbers::pi), 0.01);
  EXPECT_THROW(counting_report(2, false), PreconditionError);
}
