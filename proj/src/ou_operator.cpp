#include "ouhyper/ou_operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "ouhyper/error.hpp"

namespace ouhyper {

int default_order(int dim) {
  switch (dim) {
    case 1: return 64;
    case 2: return 32;
    default: return 16;
  }
}

SemigroupEval::SemigroupEval(double t, std::shared_ptr<const QuadRule> inner,
                             std::shared_ptr<const QuadRule> outer)
    : t_(t), inner_(std::move(inner)), outer_(std::move(outer)) {
  if (!(t_ >= 0.0) || !std::isfinite(t_)) throw ConfigError("semigroup time must be finite and >= 0");
  if (inner_->dim() != outer_->dim()) throw ConfigError("inner and outer rules must share dim");
}

SemigroupEval SemigroupEval::with_orders(double t, int dim, int inner_order, int outer_order) {
  if (inner_order <= 0) inner_order = default_order(dim);
  if (outer_order <= 0) outer_order = default_order(dim);
  return SemigroupEval(t, cached_rule(inner_order, dim), cached_rule(outer_order, dim));
}

namespace {

std::string describe(Point x) {
  std::ostringstream out;
  out << "(";
  for (std::size_t k = 0; k < x.size(); ++k) out << (k ? ", " : "") << x[k];
  out << ")";
  return out.str();
}

}  // namespace

double apply_Q(const SemigroupEval& se, const TestFunction& f, Point x) {
  const double t = se.t();
  if (t == 0.0) return f(x);
  const QuadRule& rule = se.inner();
  const double decay = std::exp(-t);
  const int d = rule.dim();
  if (decay < 1e-300) return integrate(rule, f.eval);

  const double spread = std::sqrt(-std::expm1(-2.0 * t));
  std::array<double, 8> small{};
  std::vector<double> big;
  double* buf = small.data();
  if (d > static_cast<int>(small.size())) {
    big.resize(d);
    buf = big.data();
  }
  const Point shifted(buf, static_cast<std::size_t>(d));

  double sum = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const Point y = rule.node(j);
    for (int k = 0; k < d; ++k) buf[k] = decay * x[k] + spread * y[k];
    const double v = f(shifted);
    if (!std::isfinite(v)) {
      throw EvaluationError("f = " + f.label + " not finite at shifted node " + describe(shifted) +
                            " while evaluating Q_t f at " + describe(x));
    }
    sum += rule.weight(j) * v;
  }
  return sum;
}

std::vector<double> apply_Q_on_outer(const SemigroupEval& se, const TestFunction& f) {
  const QuadRule& outer = se.outer();
  std::vector<double> out(outer.size());
  for (std::size_t i = 0; i < outer.size(); ++i) out[i] = apply_Q(se, f, outer.node(i));
  return out;
}

TestFunction semigroup_image(const SemigroupEval& se, const TestFunction& f) {
  TestFunction out;
  out.dim = f.dim;
  out.eval = [se, f](Point x) { return apply_Q(se, f, x); };
  if (f.has_grad()) {
    // grad Q_t f = e^{-t} Q_t grad f
    out.grad = [se, f](Point x) {
      const int d = f.dim;
      std::vector<double> g(d, 0.0);
      for (int k = 0; k < d; ++k) {
        TestFunction component;
        component.dim = d;
        component.eval = [&f, k](Point z) { return f.grad(z)[k]; };
        component.label = f.label;
        g[k] = std::exp(-se.t()) * apply_Q(se, component, x);
      }
      return g;
    };
  }
  out.positive = f.positive;
  out.lower_bound = f.lower_bound;
  out.upper_bound = f.upper_bound;
  std::ostringstream label;
  label << "Q_" << se.t() << "(" << f.label << ")";
  out.label = label.str();
  return out;
}

std::vector<double> values_on(const QuadRule& rule, const TestFunction& f) {
  std::vector<double> out(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    out[i] = f(rule.node(i));
    if (!std::isfinite(out[i])) {
      throw EvaluationError("f = " + f.label + " not finite at node " + describe(rule.node(i)));
    }
  }
  return out;
}

double log_mean_exp(std::span<const double> g, std::span<const double> weights, double p) {
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (weights[i] > 0.0) peak = std::max(peak, p * g[i]);
  }
  if (peak == -std::numeric_limits<double>::infinity()) return peak / p;
  if (!std::isfinite(peak)) throw RangeError("log_mean_exp: exponent not finite");
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) sum += weights[i] * std::exp(p * g[i] - peak);
  return (peak + std::log(sum)) / p;
}

double log_lp_norm_values(std::span<const double> values, std::span<const double> weights, double p) {
  if (p == 0.0 || !std::isfinite(p)) throw ConfigError("lp norm exponent must be finite and nonzero");
  std::vector<double> logs(values.size());
  double spread = 0.0;
  bool has_zero = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) throw EvaluationError("lp norm: non-finite integrand value");
    if (p < 0.0 && !(v > 0.0)) throw PreconditionError("lp norm with negative exponent needs a positive function");
    logs[i] = std::log(std::abs(v));
    if (v == 0.0) has_zero = true;
    else spread = std::max(spread, std::abs(p * logs[i]));
  }
  if (!has_zero && spread < 1.0) {
    // sum w (e^{p l} - 1) keeps the O(p) information when p l is small.
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * std::expm1(p * logs[i]);
    return std::log1p(acc) / p;
  }
  if (spread <= 500.0) {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * std::pow(std::abs(values[i]), p);
    return std::log(acc) / p;
  }
  return log_mean_exp(logs, weights, p);
}

double lp_norm_values(std::span<const double> values, std::span<const double> weights, double p) {
  const double log_norm = log_lp_norm_values(values, weights, p);
  if (log_norm > 709.0) throw RangeError("lp norm overflows double range");
  return std::exp(log_norm);
}

double log_mean_values(std::span<const double> values, std::span<const double> weights) {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw PreconditionError("log mean needs f > 0 at every node");
    acc += weights[i] * std::log(values[i]);
  }
  return std::exp(acc);
}

double lp_norm(const TestFunction& f, double p, const QuadRule& rule) {
  if (p < 0.0 && !f.positive) {
    throw PreconditionError("lp norm with p < 0 requested for " + f.label + ", which is not flagged positive");
  }
  const auto v = values_on(rule, f);
  return lp_norm_values(v, rule.weights(), p);
}

double log_mean(const TestFunction& f, const QuadRule& rule) {
  if (!f.positive) throw PreconditionError("log mean requested for " + f.label + ", which is not flagged positive");
  const auto v = values_on(rule, f);
  return log_mean_values(v, rule.weights());
}

}  // namespace ouhyper
