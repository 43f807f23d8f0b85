#pragma once

// Closed forms and an independent integrator used as test oracles. Nothing
// here touches the Gauss-Hermite machinery under test.

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// E[X^k] for X ~ N(0, 1).
inline double gaussian_moment(int k) {
  if (k % 2) return 0.0;
  double m = 1.0;
  for (int j = k - 1; j > 1; j -= 2) m *= j;
  return m;
}

/// E[e^{lambda X}].
inline double mgf(double lambda) { return std::exp(0.5 * lambda * lambda); }

/// (Q_t e^{lambda .})(x) = exp(lambda e^{-t} x + lambda^2 (1 - e^{-2t}) / 2).
inline double q_exp_linear(double lambda, double t, double x) {
  return std::exp(lambda * std::exp(-t) * x + 0.5 * lambda * lambda * -std::expm1(-2.0 * t));
}

/// (Q_t (x^2 + 1))(x) = e^{-2t} x^2 + (1 - e^{-2t}) + 1.
inline double q_quadratic(double t, double x) {
  const double e = std::exp(-2.0 * t);
  return e * x * x + (1.0 - e) + 1.0;
}

/// E[g(X)] for X ~ N(0, 1) by double-exponential quadrature on the line.
inline double expect(const std::function<double(double)>& g) {
  static boost::math::quadrature::sinh_sinh<double> integrator(12);
  const double norm = 1.0 / std::sqrt(2.0 * kPi);
  auto integrand = [&](double x) {
    const double w = std::exp(-0.5 * x * x);
    return w == 0.0 ? 0.0 : g(x) * w * norm;
  };
  return integrator.integrate(integrand, 1e-13);
}

/// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(integer(0, static_cast<int>(items.size()) - 1))];
  }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
