#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ouhyper/functions.hpp"
#include "ouhyper/quadrature.hpp"

namespace ouhyper {

/// Default nodes per axis for the inner (y) and outer (x) integrals.
int default_order(int dim);

/// Q_t on R^d together with the rules used for the inner integral and for
/// norms over x.
class SemigroupEval {
 public:
  SemigroupEval(double t, std::shared_ptr<const QuadRule> inner, std::shared_ptr<const QuadRule> outer);
  /// Cached rules of the given orders (0 selects default_order(dim)).
  static SemigroupEval with_orders(double t, int dim, int inner_order = 0, int outer_order = 0);

  double t() const noexcept { return t_; }
  int dim() const noexcept { return inner_->dim(); }
  const QuadRule& inner() const noexcept { return *inner_; }
  const QuadRule& outer() const noexcept { return *outer_; }
  std::shared_ptr<const QuadRule> inner_ptr() const noexcept { return inner_; }
  std::shared_ptr<const QuadRule> outer_ptr() const noexcept { return outer_; }

 private:
  double t_;
  std::shared_ptr<const QuadRule> inner_;
  std::shared_ptr<const QuadRule> outer_;
};

/// (Q_t f)(x) = int f(e^{-t} x + sqrt(1 - e^{-2t}) y) gamma_d(dy).
/// t = 0 returns f(x) without quadrature; e^{-t} < 1e-300 returns int f.
double apply_Q(const SemigroupEval& se, const TestFunction& f, Point x);

/// Q_t f at every node of the outer rule.
std::vector<double> apply_Q_on_outer(const SemigroupEval& se, const TestFunction& f);

/// Q_t f as a TestFunction (bounds carried over: Q_t is Markov).
TestFunction semigroup_image(const SemigroupEval& se, const TestFunction& f);

/// f at every node of the rule; throws EvaluationError on non-finite values.
std::vector<double> values_on(const QuadRule& rule, const TestFunction& f);

/// (sum_i w_i |v_i|^p)^{1/p} for p != 0. Negative p requires v_i > 0.
/// Works in log space when p max|log|v|| > 500, and through log1p/expm1
/// when p max|log|v|| < 1 so that small |p| keeps full precision.
double lp_norm_values(std::span<const double> values, std::span<const double> weights, double p);

/// log of the above.
double log_lp_norm_values(std::span<const double> values, std::span<const double> weights, double p);

/// (1/p) log sum_i w_i exp(p g_i), computed by log-sum-exp.
double log_mean_exp(std::span<const double> g, std::span<const double> weights, double p);

/// exp(sum_i w_i log v_i); v_i must be > 0.
double log_mean_values(std::span<const double> values, std::span<const double> weights);

double lp_norm(const TestFunction& f, double p, const QuadRule& rule);
double log_mean(const TestFunction& f, const QuadRule& rule);

}  // namespace ouhyper
