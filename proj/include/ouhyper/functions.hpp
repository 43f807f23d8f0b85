#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ouhyper/quadrature.hpp"

namespace ouhyper {

using ParamMap = std::map<std::string, double>;
using GradientField = std::function<std::vector<double>(Point)>;

/// A function f : R^d -> R with declared bounds and an optional analytic
/// gradient. Flags are declared by the constructor, never inferred.
struct TestFunction {
  int dim = 1;
  ScalarField eval;
  GradientField grad;  // empty when not available
  bool positive = false;
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
  std::string label;

  double operator()(Point x) const { return eval(x); }
  bool has_grad() const { return static_cast<bool>(grad); }
  bool nonnegative() const { return positive || (lower_bound && *lower_bound >= 0.0); }
  bool bounded_away_from_zero() const { return lower_bound && *lower_bound > 0.0; }
};

/// Gradient of f at x: analytic when available, else central differences
/// with step 1e-5 * max(1, |x_k|).
std::vector<double> gradient(const TestFunction& f, Point x);

/// scale * f + offset, with bounds and flags carried through.
TestFunction affine(const TestFunction& f, double scale, double offset);

/// Test-function families:
///   exp_linear(lambda[, lambda2, lambda3])  f = exp(lambda . x)
///   constant(kappa)                         f = kappa
///   shifted_gauss_bump(a, sigma, kappa)     f = kappa + exp(-|x - a e1|^2 / (2 sigma^2))
///   poly_plus_const(c0, c1, ..., kappa)     f = kappa + c0 + sum_{k>=1} c_k sum_i x_i^k
///   logistic(a, b)                          f = 1 + 1 / (1 + exp(-(a x1 + b)))
///   linear(lambda[, lambda2, lambda3], kappa)  f = lambda . x + kappa
///   sine(a, kappa)                          f = kappa + a sin(x1)
///   smooth_abs(a, eps, kappa)               f = kappa + a sqrt(|x|^2 + eps^2)
/// Throws ConfigError on unknown names, bad parameters, or when
/// require_positive is set and the family member is not positive.
TestFunction builtin_f(const std::string& name, const ParamMap& params, int dim = 1,
                       bool require_positive = false);

/// Generator c : (0, inf) -> (0, inf) of the u/phi construction. All
/// members are evaluated in log space where possible: log_c and
/// dlog_c = c'/c stay finite where c itself overflows.
struct GeneratorC {
  std::string name;
  ParamMap params;
  std::function<double(double)> c;
  std::function<double(double)> c_prime;
  std::function<double(double)> log_c;
  std::function<double(double)> dlog_c;
  /// Closed forms of u(t, x) and its inverse in the e^{2t} time
  /// parameterization; used only as test oracles.
  std::function<double(double, double)> closed_form_u;
  std::function<double(double, double)> closed_form_phi;

  std::string label() const;
  /// c / c', computed as 1 / dlog_c.
  double ratio(double x) const { return 1.0 / dlog_c(x); }
};

/// Generator families:
///   power(p)               c = x^{p-1},                 p > 1
///   exp                    c = e^x
///   exm1(alpha, beta)      c = x^{alpha+beta-1} exp(x^beta),  beta > 0
///   loglog(alpha, beta, a) c = (x+a)^alpha / log^beta(x+a),   alpha, beta > 0, a >= e^{2+beta/alpha}
///   inv_power(alpha, kappa)  c = (x+kappa)^{-(alpha+1)},  alpha > 0, kappa > 0
///   exp_decay(kappa)       c = exp(-(x - kappa)),       kappa >= 0
///   inv_shift(kappa)       c = 1 / (x + kappa),          kappa > 0
///   inv_shift_pow(s, kappa)  c = (x+kappa)^{-e^{-2s}},  s > 0, kappa > 0
GeneratorC builtin_c(const std::string& name, const ParamMap& params = {});

/// "name:key=value,key=value" -> (name, params). Throws ConfigError.
std::pair<std::string, ParamMap> parse_family_spec(const std::string& spec);

TestFunction function_from_spec(const std::string& spec, int dim = 1);

/// Five-function reference corpus (all positive, smooth, with a finite
/// moment generating function): an exponential, x^2 + 1, a bump on a
/// constant, a logistic step and a sine on a constant.
const std::vector<std::string>& default_corpus();
GeneratorC generator_from_spec(const std::string& spec);

struct GridSpec {
  double x_min = 1e-3;
  double x_max = 1e3;
  int n_points = 200;
  bool log_spaced = true;
};

/// "x_min:x_max:n[:log|lin]". Throws ConfigError.
GridSpec parse_grid_spec(const std::string& spec);
std::vector<double> make_grid(const GridSpec& grid);

enum class Condition { C, CPrime };

struct Violation {
  double x;
  double diagnostic;
  std::string reason;
};

struct ConditionReport {
  Condition condition = Condition::C;
  bool passed = false;
  std::vector<double> grid;
  std::vector<Violation> violations;
  /// Smallest distance to a violation over all checks; negative exactly
  /// when a check failed.
  double min_margin = 0.0;
  std::string summary;
};

std::string condition_name(Condition c);

/// c' > 0 and c/c' concave on the grid. Concavity is tested on consecutive
/// triples by the chord deviation
///   D = [(x2-x1) r(x0) + (x1-x0) r(x2)] / (x2-x0) - r(x1),
/// a violation when D > 1e-9 max(1, |r(x1)|).
ConditionReport check_condition_C(const GeneratorC& c, const GridSpec& grid = {});

/// c' < 0, c/c' convex (violation when -D > tolerance), and c finite at
/// x_min and x_min / 2.
ConditionReport check_condition_Cprime(const GeneratorC& c, const GridSpec& grid = {});

}  // namespace ouhyper
