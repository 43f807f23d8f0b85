#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "ouhyper/error.hpp"
#include "ouhyper/uv_construction.hpp"

using namespace ouhyper;

namespace {

const std::vector<std::string> kClosedForm = {"power:p=2", "power:p=3", "exp", "inv_power:alpha=1,kappa=1",
                                              "inv_power:alpha=0.5,kappa=2", "exp_decay:kappa=1",
                                              "inv_shift:kappa=1"};

}  // namespace

TEST(UPhi, MatchesClosedForms) {
  for (const auto& spec : kClosedForm) {
    const auto c = generator_from_spec(spec);
    for (double t : {0.0, 0.25, 1.0, 2.0}) {
      const auto up = UPhi::at_time(c, t);
      for (double x : {1e-3, 0.1, 0.5, 1.0, 2.0, 3.7}) {
        const double want = c.closed_form_u(t, x);
        if (!std::isfinite(want)) continue;
        double got = 0.0;
        try {
          got = up.u(x);
        } catch (const RangeError&) {
          continue;  // exp at t = 2 overflows for larger x
        }
        EXPECT_LE(oracle::rel_diff(got, want), 1e-9) << spec << " t=" << t << " x=" << x;
        // phi is accurate in the u scale; in x the error grows where u is flat.
        // Where u' is below the tolerance the inverse carries no information.
        const double slope = std::exp(up.power() * c.log_c(x));
        if (slope < 1e-12) continue;
        const auto inv = up.phi(want);
        const double tol = up.integration_tol() * (1.0 + want);
        EXPECT_LE(std::abs(up.u(inv.x) - want), 2.0 * tol) << spec << " t=" << t << " y=" << want;
        EXPECT_LE(std::abs(inv.x - x), 4.0 * tol / slope + 1e-9 * std::max(1.0, x) + inv.error_estimate)
            << spec << " t=" << t << " y=" << want;
        const double want_phi = c.closed_form_phi(t, want);
        // Compare in x only where the inverse is well conditioned (elasticity x u'(x) / u(x)).
        if (std::isfinite(want_phi) && x * slope / want > 1e-3) {
          EXPECT_LE(oracle::rel_diff(inv.x, want_phi), 1e-8 + 4.0 * tol / (x * slope))
              << spec << " t=" << t << " y=" << want;
        }
      }
    }
  }
}

TEST(UPhi, RoundTrips) {
  oracle::Gen gen(31);
  const std::vector<std::string> specs = {"power:p=2", "exp", "exm1:alpha=1,beta=1", "exm1:alpha=0.5,beta=0.5",
                                          "loglog:alpha=1,beta=1,a=20.085536923187668", "inv_power:alpha=1,kappa=1",
                                          "exp_decay:kappa=0.5"};
  for (int i = 0; i < 60; ++i) {
    const auto c = generator_from_spec(gen.pick(specs));
    const auto up = UPhi::at_time(c, gen.uniform(0.0, 1.0));
    const double x = gen.log_uniform(1e-2, 5.0);
    double y = 0.0;
    try {
      y = up.u(x);
    } catch (const RangeError&) {
      continue;
    }
    const auto inv = up.phi(y);
    const double slope = std::exp(up.power() * c.log_c(x));
    const double tol = up.integration_tol() * (1.0 + y);
    EXPECT_LE(std::abs(up.u(inv.x) - y), 2.0 * tol) << c.label() << " x=" << x;
    EXPECT_LE(std::abs(inv.x - x), 4.0 * tol / slope + 1e-9 * std::max(1.0, x) + inv.error_estimate)
        << c.label() << " x=" << x;
  }
}

TEST(UPhi, UIsIncreasingAndStartsAtZero) {
  const auto up = UPhi::at_time(generator_from_spec("exm1:alpha=1,beta=1"), 0.3);
  EXPECT_EQ(up.u(0.0), 0.0);
  double prev = 0.0;
  for (int k = 1; k <= 40; ++k) {
    const double v = up.u(0.1 * k);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(UPhi, MartingaleTimeIsTheSameFamily) {
  // tau = e^{-2t} selects the same power as theorem time t.
  const auto c = generator_from_spec("exm1:alpha=1,beta=0.5");
  for (double t : {0.1, 0.5, 1.0}) {
    const auto a = UPhi::at_time(c, t);
    const auto b = UPhi::at_martingale_time(c, std::exp(-2.0 * t));
    EXPECT_NEAR(a.power(), b.power(), 1e-12);
    for (double x : {0.2, 1.0, 2.5}) EXPECT_LE(oracle::rel_diff(a.u(x), b.u(x)), 1e-12);
  }
}

TEST(UPhi, CopiesShareTheirTable) {
  const auto a = UPhi::at_time(generator_from_spec("exp"), 0.5);
  const UPhi b = a;
  EXPECT_EQ(a.u(1.3), b.u(1.3));
}

TEST(UPhi, Errors) {
  const auto c = generator_from_spec("exp");
  EXPECT_THROW(UPhi::at_time(c, -1.0), ConfigError);
  EXPECT_THROW(UPhi::at_martingale_time(c, 0.0), ConfigError);
  EXPECT_THROW(UPhi::at_time(c, 0.0, 0.0), ConfigError);
  const auto up = UPhi::at_time(c, 0.0);
  EXPECT_THROW(up.u(-1.0), RangeError);
  EXPECT_THROW(up.u(800.0), RangeError);
  EXPECT_THROW(up.phi(-1.0), RangeError);
  EXPECT_THROW(up.phi(std::numeric_limits<double>::infinity()), RangeError);
  // u for exp_decay is bounded by e^kappa, so larger values have no preimage.
  const auto bounded = UPhi::at_time(generator_from_spec("exp_decay:kappa=0"), 0.0);
  EXPECT_THROW(bounded.phi(1.5), RangeError);
}

TEST(InvertIncreasing, FindsRootsAcrossScales) {
  for (double y : {1e-8, 0.3, 1.0, 7.0, 1e6}) {
    const auto r = invert_increasing([](double x) { return x * x * x; }, y, 1e-14, 1e12);
    const double x = std::cbrt(y);
    EXPECT_LE(std::abs(r.x - x), 2e-14 / (3 * x * x) + 1e-12 * x) << y;
  }
  EXPECT_EQ(invert_increasing([](double x) { return x; }, 0.0, 1e-12, 1e12).x, 0.0);
  EXPECT_THROW(invert_increasing([](double x) { return std::log1p(x); }, 100.0, 1e-12, 1e12), RangeError);
}

TEST(GHPair, PowerTwo) {
  const GHPair gh(generator_from_spec("power:p=2"));
  for (double x : {0.2, 1.0, 2.5}) {
    EXPECT_NEAR(gh.G(x), x * x / 2, 1e-12 * std::max(1.0, x * x));
    EXPECT_NEAR(gh.H(x), x * x / 2 * std::log(x) - x * x / 4, 1e-11 * std::max(1.0, x * x));
    EXPECT_NEAR(gh.G_inverse(x * x / 2).x, x, 1e-10);
  }
}

TEST(GHPair, Exponential) {
  const GHPair gh(generator_from_spec("exp"));
  for (double x : {0.1, 1.0, 3.0}) {
    EXPECT_LE(oracle::rel_diff(gh.G(x), std::expm1(x)), 1e-11);
    EXPECT_LE(oracle::rel_diff(gh.H(x), (x - 1) * std::exp(x) + 1), 1e-10);
    EXPECT_NEAR(eval_Ginv(gh, std::expm1(x)), x, 1e-10);
  }
  EXPECT_THROW(gh.H(-1.0), RangeError);
}

TEST(CumulativeIntegral, SinglePanelsAndMemo) {
  const CumulativeIntegral ci([](double y) { return std::cos(y); }, 1e-13);
  EXPECT_NEAR(ci(1.0), std::sin(1.0), 1e-13);
  EXPECT_NEAR(ci(10.0), std::sin(10.0), 1e-12);
  EXPECT_NEAR(ci.panel(2.0, 2.001), std::sin(2.001) - std::sin(2.0), 1e-16);
  const CumulativeIntegral blow([](double y) { return std::exp(y); }, 1e-13);
  EXPECT_TRUE(std::isinf(blow(1000.0)));
}
