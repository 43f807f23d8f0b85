#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ouhyper/functions.hpp"
#include "ouhyper/uv_construction.hpp"

namespace ouhyper {

/// Numerical settings shared by every check.
struct NumericOptions {
  int inner_order = 0;  // 0 selects default_order(dim)
  int outer_order = 0;
  double integration_tol = 1e-13;
  double inversion_tol = 1e-12;
  double slack_factor = 10.0;
  double slack_floor = 1e-9;
  /// Refuse genhc / glsi / genrhc when the generator fails its condition
  /// on condition_grid. When false the check runs and the verdict notes
  /// the failed condition.
  bool enforce_conditions = true;
  GridSpec condition_grid{};
};

enum class Direction { LessEq, GreaterEq };

/// One inequality evaluation. margin is the amount by which the claim
/// holds (rhs - lhs for <=, lhs - rhs for >=); holds = margin >= -slack.
struct Verdict {
  std::string name;
  Direction direction = Direction::LessEq;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double slack = 0.0;
  bool holds = false;
  double error_estimate = 0.0;
  std::map<std::string, std::string> inputs;
  std::string note;
};

/// Builds a verdict from the two sides; slack is
/// max(slack_factor (error_estimate + inversion_tol), slack_floor max(|lhs|, |rhs|, 1)).
Verdict make_verdict(std::string name, Direction direction, double lhs, double rhs, double error_estimate,
                     const NumericOptions& opts);

/// ||Q_t f||_{q(t)} <= ||f||_p with q(t) = e^{2t}(p-1)+1. q_scale != 1
/// multiplies q(t) (diagnostic mode for counterexample search only).
Verdict check_hc(const TestFunction& f, double p, double t, const NumericOptions& opts = {},
                 double q_scale = 1.0);

/// ||exp(Q_t f)||_{e^{2t}} <= ||e^f||_1, evaluated in log space.
Verdict check_ehc(const TestFunction& f, double t, const NumericOptions& opts = {});

/// phi(t, ||u(t, Q_t f)||_1) <= phi(0, ||u(0, f)||_1) for f >= 0.
Verdict check_genhc(const GeneratorC& c, const TestFunction& f, double t, const NumericOptions& opts = {});

struct CurvePoint {
  double t;
  double value;
  double slack;
};

struct GenhcCurve {
  std::vector<CurvePoint> points;
  double max_upward_jump = 0.0;
  bool nonincreasing = true;
};

/// t -> phi(t, ||u(t, Q_t f)||_1) on an ascending grid, with a
/// monotonicity diagnostic (largest increase between neighbours).
GenhcCurve curve_genhc(const GeneratorC& c, const TestFunction& f, const std::vector<double>& t_grid,
                       const NumericOptions& opts = {});

/// int f^2 log|f| <= int |grad f|^2 + ||f||_2^2 log ||f||_2.
Verdict check_lsi(const TestFunction& f, const NumericOptions& opts = {});

/// int H(f) <= 1/2 int c'(f)|grad f|^2 + H(G^{-1}(||G(f)||_1)) for f bounded
/// away from zero.
Verdict check_glsi(const GeneratorC& c, const TestFunction& f, const NumericOptions& opts = {});

/// ||1/Q_t f||_{e^{2t}(alpha+1)-1} <= ||1/f||_alpha for positive f.
Verdict check_rhc(const TestFunction& f, double alpha, double t, const NumericOptions& opts = {});

/// Reverse form: phi(t, ||u(t, Q_t f)||_1) >= phi(0, ||u(0, f)||_1) under (C').
Verdict check_genrhc(const GeneratorC& c, const TestFunction& f, double t, const NumericOptions& opts = {});

/// ||1/Q_t f||_{e^{2t}-1} <= exp(-int log f), t > 0.
Verdict check_ctmain(const TestFunction& f, double t, const NumericOptions& opts = {});

/// ||f||_1 >= exp(int log Q_s f) >= ||Q_t f||_{1-e^{-2(s-t)}}, 0 <= t < s.
std::pair<Verdict, Verdict> check_sandwich(const TestFunction& f, double s, double t,
                                           const NumericOptions& opts = {});

/// Integrability transfer for the exm1 and loglog generators: evaluates the
/// premise and conclusion integrals (reported in inputs) and the bound
///   int u(t, Q_t f) <= u(t, phi(0, int u(0, f)))
/// implied by the generalized inequality. b > 1 is the loglog offset.
Verdict check_integrability_implication(const GeneratorC& c, const TestFunction& f, double t, double b = 2.0,
                                        const NumericOptions& opts = {});

/// Affine majorant c/c' <= kappa1 x + kappa2 fitted on a grid (tangent at
/// the right end, then the smallest intercept). Informational only.
std::pair<double, double> fit_affine_majorant(const GeneratorC& c, const GridSpec& grid = {});

/// Names accepted by the CLI / scan dispatcher.
const std::vector<std::string>& inequality_names();

/// True for the inequalities built on a generator c.
bool needs_generator(const std::string& inequality);

/// Scalar inputs of run_named_check; each check reads the ones it uses.
struct CheckParams {
  double p = 2.0;
  double t = 0.5;
  double alpha = 1.0;
  double s = 1.0;
  double b = 2.0;
  double q_scale = 1.0;
};

/// Runs the inequality called `name` on f. "sandwich" yields two verdicts
/// and "equiv" runs hc and ehc on the same f. c must be non-null exactly
/// when needs_generator(name). Errors propagate.
std::vector<Verdict> run_named_check(const std::string& name, const TestFunction& f, const GeneratorC* c,
                                     const CheckParams& params, const NumericOptions& opts = {});

std::string format_double(double v);

}  // namespace ouhyper
