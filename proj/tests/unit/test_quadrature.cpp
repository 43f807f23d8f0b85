#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "ouhyper/error.hpp"
#include "ouhyper/quadrature.hpp"

using namespace ouhyper;

TEST(GaussHermite, WeightsArePositiveAndSumToOne) {
  for (int n : {2, 3, 8, 20, 64, 128, 256}) {
    std::vector<double> x, w;
    gauss_hermite_1d(n, x, w);
    ASSERT_EQ(x.size(), static_cast<std::size_t>(n));
    double total = 0.0;
    for (double wi : w) {
      EXPECT_GT(wi, 0.0);
      total += wi;
    }
    EXPECT_NEAR(total, 1.0, 1e-14) << "order " << n;
    EXPECT_TRUE(std::is_sorted(x.begin(), x.end()));
  }
}

TEST(GaussHermite, NodesAreSymmetric) {
  std::vector<double> x, w;
  gauss_hermite_1d(33, x, w);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i], -x[x.size() - 1 - i]);
    EXPECT_EQ(w[i], w[x.size() - 1 - i]);
  }
  EXPECT_EQ(x[16], 0.0);
}

TEST(GaussHermite, TwoPointRuleIsPlusMinusOne) {
  std::vector<double> x, w;
  gauss_hermite_1d(2, x, w);
  EXPECT_NEAR(x[0], -1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
  EXPECT_NEAR(w[0], 0.5, 1e-15);
}

TEST(GaussHermite, ExactForMomentsUpToDegree2nMinus1) {
  const auto rule = build_rule(20, 1);
  for (int k = 0; k <= 39; ++k) {
    const double got = integrate(rule, [k](Point x) { return std::pow(x[0], k); });
    const double want = oracle::gaussian_moment(k);
    const double scale = std::max(1.0, oracle::gaussian_moment(k % 2 ? k + 1 : k));
    EXPECT_LE(std::abs(got - want) / scale, 1e-10) << "k = " << k;
  }
}

TEST(GaussHermite, MomentGeneratingFunction) {
  const auto rule = build_rule(64, 1);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const double got = integrate(rule, [lambda](Point x) { return std::exp(lambda * x[0]); });
    EXPECT_LE(oracle::rel_diff(got, oracle::mgf(lambda)), 1e-9);
  }
}

TEST(GaussHermite, HighOrderRuleKeepsTailAccuracy) {
  // E[e^{5X}] = e^{12.5} needs accurate weights far in the tails.
  const auto rule = build_rule(256, 1);
  const double got = integrate(rule, [](Point x) { return std::exp(5.0 * x[0]); });
  EXPECT_LE(oracle::rel_diff(got, oracle::mgf(5.0)), 1e-10);
}

TEST(TensorRule, ProductMoments) {
  const auto rule = build_rule(10, 2);
  EXPECT_EQ(rule.size(), 100u);
  EXPECT_EQ(rule.dim(), 2);
  EXPECT_NEAR(integrate(rule, [](Point x) { return x[0] * x[0] * x[1] * x[1]; }), 1.0, 1e-13);
  EXPECT_NEAR(integrate(rule, [](Point x) { return x[0] * x[1]; }), 0.0, 1e-15);
  EXPECT_NEAR(integrate(rule, [](Point x) { return std::pow(x[1], 4); }), 3.0, 1e-12);

  const auto rule3 = build_rule(6, 3);
  EXPECT_EQ(rule3.size(), 216u);
  const double got = integrate(rule3, [](Point x) { return std::exp(0.3 * x[0] - 0.2 * x[1] + 0.1 * x[2]); });
  EXPECT_LE(oracle::rel_diff(got, std::exp(0.5 * (0.09 + 0.04 + 0.01))), 1e-9);
}

TEST(TensorRule, MatchesOneDimensionalRuleOnSeparableIntegrand) {
  const auto r1 = build_rule(16, 1);
  const auto r2 = build_rule(16, 2);
  const double one = integrate(r1, [](Point x) { return std::cos(x[0]); });
  const double two = integrate(r2, [](Point x) { return std::cos(x[0]) * std::cos(x[1]); });
  EXPECT_NEAR(two, one * one, 1e-14);
}

TEST(BuildRule, RejectsOutOfRangeInputs) {
  EXPECT_THROW(build_rule(1, 1), ConfigError);
  EXPECT_THROW(build_rule(257, 1), ConfigError);
  EXPECT_THROW(build_rule(8, 0), ConfigError);
  EXPECT_THROW(build_rule(8, 4), ConfigError);
}

TEST(CachedRule, ReturnsSharedInstance) {
  const auto a = cached_rule(24, 1);
  const auto b = cached_rule(24, 1);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_NE(a.get(), cached_rule(24, 2).get());
}

TEST(Integrate, NonFiniteValueNamesTheNode) {
  const auto rule = build_rule(8, 1);
  try {
    integrate(rule, [](Point x) { return std::log(x[0]); });
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(IntegrateWithError, ConvergesForSmoothIntegrands) {
  const auto r = integrate_with_error([](Point x) { return std::exp(x[0]); }, 1, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(oracle::rel_diff(r.value, oracle::mgf(1.0)), 1e-12);
  EXPECT_LE(r.error_estimate, 1e-12);
}

TEST(IntegrateWithError, HeavyGaussianWeightStillConverges) {
  // E[e^{X^2/4}] = sqrt(2).
  const auto r = integrate_with_error([](Point x) { return std::exp(0.25 * x[0] * x[0]); }, 1, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, std::sqrt(2.0), 1e-11);
}

TEST(IntegrateWithError, ReportsNonConvergenceForKinks) {
  // E|X| = sqrt(2/pi); the kink limits Gauss-Hermite to algebraic rates.
  const auto r = integrate_with_error([](Point x) { return std::abs(x[0]); }, 1, 1e-12);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.order, 256);
  EXPECT_GT(r.error_estimate, 1e-12);
  EXPECT_NEAR(r.value, std::sqrt(2.0 / oracle::kPi), 1e-2);
  // The estimate is of the right size: it bounds the true error within a factor 10.
  EXPECT_LE(std::abs(r.value - std::sqrt(2.0 / oracle::kPi)), 10.0 * r.error_estimate);
}

TEST(IntegrateWithError, DimensionCapsDiffer) {
  const auto r = integrate_with_error([](Point x) { return std::abs(x[0]) + std::abs(x[1]); }, 2, 1e-14);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.order, 128);
}
