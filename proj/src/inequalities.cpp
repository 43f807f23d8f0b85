#include "ouhyper/inequalities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ouhyper/error.hpp"
#include "ouhyper/ou_operator.hpp"

namespace ouhyper {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& inequality_names() {
  static const std::vector<std::string> names{"hc",   "ehc",  "genhc",  "lsi",      "glsi",        "rhc",
                                              "genrhc", "ctmain", "sandwich", "integrability", "equiv"};
  return names;
}

bool needs_generator(const std::string& inequality) {
  return inequality == "genhc" || inequality == "genrhc" || inequality == "glsi" || inequality == "integrability";
}

std::vector<Verdict> run_named_check(const std::string& name, const TestFunction& f, const GeneratorC* c,
                                     const CheckParams& params, const NumericOptions& opts) {
  if (needs_generator(name) && !c) throw ConfigError(name + " needs a generator c");
  if (!needs_generator(name) && c) throw ConfigError(name + " does not take a generator c");
  if (name == "hc") return {check_hc(f, params.p, params.t, opts, params.q_scale)};
  if (name == "ehc") return {check_ehc(f, params.t, opts)};
  if (name == "equiv") return {check_hc(f, params.p, params.t, opts), check_ehc(f, params.t, opts)};
  if (name == "genhc") return {check_genhc(*c, f, params.t, opts)};
  if (name == "lsi") return {check_lsi(f, opts)};
  if (name == "glsi") return {check_glsi(*c, f, opts)};
  if (name == "rhc") return {check_rhc(f, params.alpha, params.t, opts)};
  if (name == "genrhc") return {check_genrhc(*c, f, params.t, opts)};
  if (name == "ctmain") return {check_ctmain(f, params.t, opts)};
  if (name == "sandwich") {
    auto [upper, lower] = check_sandwich(f, params.s, params.t, opts);
    return {upper, lower};
  }
  if (name == "integrability") return {check_integrability_implication(*c, f, params.t, params.b, opts)};
  throw ConfigError("unknown inequality '" + name + "'");
}

Verdict make_verdict(std::string name, Direction direction, double lhs, double rhs, double error_estimate,
                     const NumericOptions& opts) {
  Verdict v;
  v.name = std::move(name);
  v.direction = direction;
  v.lhs = lhs;
  v.rhs = rhs;
  v.error_estimate = error_estimate;
  v.margin = direction == Direction::LessEq ? rhs - lhs : lhs - rhs;
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
  v.slack = std::max(opts.slack_factor * (error_estimate + opts.inversion_tol), opts.slack_floor * scale);
  v.holds = std::isfinite(v.margin) && v.margin >= -v.slack;
  return v;
}

namespace {

// Primary resolution first, then a coarser one used for the error estimate.
std::array<int, 2> orders_for(int requested, int dim) {
  const int n = requested > 0 ? requested : default_order(dim);
  return {n, std::max(kMinOrder, std::max(std::min(8, n - 1), n / 2))};
}

std::array<SemigroupEval, 2> levels(double t, int dim, const NumericOptions& opts) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("quadrature-based checks support dim 1..3");
  const auto in = orders_for(opts.inner_order, dim);
  const auto out = orders_for(opts.outer_order, dim);
  return {SemigroupEval::with_orders(t, dim, in[0], out[0]), SemigroupEval::with_orders(t, dim, in[1], out[1])};
}

struct Sides {
  double lhs = 0.0;
  double rhs = 0.0;
  double numeric_error = 0.0;
};

template <class Compute>
Verdict two_level(const std::string& name, Direction dir, double t, int dim, const NumericOptions& opts,
                  Compute&& compute) {
  const auto lv = levels(t, dim, opts);
  const Sides fine = compute(lv[0]);
  const Sides coarse = compute(lv[1]);
  const double quad_err = std::max(std::abs(fine.lhs - coarse.lhs), std::abs(fine.rhs - coarse.rhs));
  Verdict v = make_verdict(name, dir, fine.lhs, fine.rhs, quad_err + fine.numeric_error, opts);
  v.inputs["inner_order"] = std::to_string(lv[0].inner().order());
  v.inputs["outer_order"] = std::to_string(lv[0].outer().order());
  v.inputs["dim"] = std::to_string(dim);
  return v;
}

void require_time(double t, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError(std::string(what) + ": t must be finite and >= 0");
}

std::vector<double> reciprocal(std::vector<double> v) {
  for (double& x : v) {
    if (!(x > 0.0)) throw PreconditionError("reciprocal norm needs a positive function at every node");
    x = 1.0 / x;
  }
  return v;
}

std::vector<double> clamp_nonnegative(std::vector<double> v) {
  for (double& x : v) x = std::max(x, 0.0);
  return v;
}

double weighted_sum(const std::vector<double>& v, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i];
  return s;
}

void require_condition(const GeneratorC& c, Condition which, const NumericOptions& opts, std::string& note) {
  const ConditionReport report =
      which == Condition::C ? check_condition_C(c, opts.condition_grid) : check_condition_Cprime(c, opts.condition_grid);
  if (!report.passed) {
    if (opts.enforce_conditions) throw PreconditionError(report.summary);
    note = "condition override: " + report.summary;
  }
}

// phi(t, ||u(t, Q_t f)||_1) and phi(0, ||u(0, f)||_1) at one resolution.
Sides generalized_sides(const UPhi& u_t, const UPhi& u_0, const SemigroupEval& se, const TestFunction& f,
                        bool t_is_zero) {
  const auto& w = se.outer().weights();
  const auto fv = clamp_nonnegative(values_on(se.outer(), f));
  std::vector<double> u0v(fv.size());
  for (std::size_t i = 0; i < fv.size(); ++i) u0v[i] = u_0.u(fv[i]);
  const double m0 = weighted_sum(u0v, w);
  if (!std::isfinite(m0)) throw EvaluationError("||u(0, f)||_1 is not finite for " + f.label);
  const InversionResult rhs = u_0.phi(m0);
  Sides s;
  s.rhs = rhs.x;
  if (t_is_zero) {
    s.lhs = s.rhs;
    s.numeric_error = rhs.error_estimate;
    return s;
  }
  const auto qv = clamp_nonnegative(apply_Q_on_outer(se, f));
  std::vector<double> utv(qv.size());
  for (std::size_t i = 0; i < qv.size(); ++i) utv[i] = u_t.u(qv[i]);
  const double mt = weighted_sum(utv, w);
  const InversionResult lhs = u_t.phi(mt);
  s.lhs = lhs.x;
  s.numeric_error = lhs.error_estimate + rhs.error_estimate +
                    u_t.integration_tol() * (std::abs(s.lhs) + std::abs(s.rhs));
  return s;
}

// Relative disagreement of ||u(0, f)||_1 between two rules; large values
// mean the integral is not resolved (u(0, f) likely not integrable).
void require_resolved_u0(const UPhi& u_0, const TestFunction& f, const std::array<SemigroupEval, 2>& lv) {
  std::array<double, 2> m{};
  for (int k = 0; k < 2; ++k) {
    const auto fv = clamp_nonnegative(values_on(lv[k].outer(), f));
    double s = 0.0;
    for (std::size_t i = 0; i < fv.size(); ++i) s += lv[k].outer().weight(i) * u_0.u(fv[i]);
    m[k] = s;
  }
  if (std::abs(m[0] - m[1]) > 1e-2 * std::max(std::abs(m[0]), 1e-300)) {
    throw EvaluationError("||u(0, f)||_1 is not resolved by quadrature for " + f.label +
                          " (u(0, f) is likely not integrable)");
  }
}

Verdict generalized(const std::string& name, Direction dir, const GeneratorC& c, const TestFunction& f, double t,
                    const NumericOptions& opts) {
  const UPhi u_t = UPhi::at_time(c, t, opts.integration_tol);
  const UPhi u_0 = UPhi::at_time(c, 0.0, opts.integration_tol);
  require_resolved_u0(u_0, f, levels(t, f.dim, opts));
  Verdict v = two_level(name, dir, t, f.dim, opts,
                        [&](const SemigroupEval& se) { return generalized_sides(u_t, u_0, se, f, t == 0.0); });
  if (t == 0.0) {
    v.rhs = v.lhs;
    v.margin = 0.0;
    v.holds = true;
  }
  v.inputs["c"] = c.label();
  v.inputs["f"] = f.label;
  v.inputs["t"] = format_double(t);
  return v;
}

}  // namespace

Verdict check_hc(const TestFunction& f, double p, double t, const NumericOptions& opts, double q_scale) {
  require_time(t, "hc");
  if (!(p > 1.0)) throw ConfigError("hc: p must be > 1");
  const double q = (std::exp(2.0 * t) * (p - 1.0) + 1.0) * q_scale;
  Verdict v = two_level("hc", Direction::LessEq, t, f.dim, opts, [&](const SemigroupEval& se) {
    Sides s;
    const auto& w = se.outer().weights();
    s.rhs = lp_norm_values(values_on(se.outer(), f), w, p);
    if (t == 0.0 && q_scale == 1.0) s.lhs = s.rhs;
    else s.lhs = lp_norm_values(apply_Q_on_outer(se, f), w, q);
    return s;
  });
  v.inputs["f"] = f.label;
  v.inputs["p"] = format_double(p);
  v.inputs["t"] = format_double(t);
  v.inputs["q"] = format_double(q);
  if (q_scale != 1.0) {
    v.inputs["q_scale"] = format_double(q_scale);
    v.note = "diagnostic: exponent scaled away from q(t)";
  }
  return v;
}

Verdict check_ehc(const TestFunction& f, double t, const NumericOptions& opts) {
  require_time(t, "ehc");
  const double k = std::exp(2.0 * t);
  Verdict v = two_level("ehc", Direction::LessEq, t, f.dim, opts, [&](const SemigroupEval& se) {
    Sides s;
    const auto& w = se.outer().weights();
    const double log_rhs = log_mean_exp(values_on(se.outer(), f), w, 1.0);
    const double log_lhs = t == 0.0 ? log_rhs : log_mean_exp(apply_Q_on_outer(se, f), w, k);
    if (log_rhs > 709.0 || log_lhs > 709.0) {
      throw RangeError("ehc: ||e^f||_1 or ||exp(Q_t f)||_{e^{2t}} exceeds the double range for " + f.label);
    }
    s.lhs = std::exp(log_lhs);
    s.rhs = std::exp(log_rhs);
    return s;
  });
  v.inputs["f"] = f.label;
  v.inputs["t"] = format_double(t);
  return v;
}

Verdict check_genhc(const GeneratorC& c, const TestFunction& f, double t, const NumericOptions& opts) {
  require_time(t, "genhc");
  if (!f.nonnegative()) throw PreconditionError("genhc needs a nonnegative f; " + f.label + " is not flagged so");
  std::string note;
  require_condition(c, Condition::C, opts, note);
  Verdict v = generalized("genhc", Direction::LessEq, c, f, t, opts);
  v.note = note;
  const auto [k1, k2] = fit_affine_majorant(c, opts.condition_grid);
  v.inputs["kappa1_fit"] = format_double(k1);
  v.inputs["kappa2_fit"] = format_double(k2);
  return v;
}

GenhcCurve curve_genhc(const GeneratorC& c, const TestFunction& f, const std::vector<double>& t_grid,
                       const NumericOptions& opts) {
  if (t_grid.empty()) throw ConfigError("curve_genhc: empty t grid");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw ConfigError("curve_genhc: t grid must be ascending");
  GenhcCurve curve;
  for (double t : t_grid) {
    const Verdict v = check_genhc(c, f, t, opts);
    curve.points.push_back({t, v.lhs, v.slack});
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const double jump = curve.points[i].value - curve.points[i - 1].value;
    curve.max_upward_jump = std::max(curve.max_upward_jump, jump);
    if (jump > std::max(curve.points[i].slack, curve.points[i - 1].slack)) curve.nonincreasing = false;
  }
  return curve;
}

Verdict check_lsi(const TestFunction& f, const NumericOptions& opts) {
  Verdict v = two_level("lsi", Direction::LessEq, 0.0, f.dim, opts, [&](const SemigroupEval& se) {
    const QuadRule& rule = se.outer();
    const auto fv = values_on(rule, f);
    double ent = 0.0;
    double energy = 0.0;
    double mass2 = 0.0;
    for (std::size_t i = 0; i < fv.size(); ++i) {
      const double a = std::abs(fv[i]);
      if (a > 0.0) ent += rule.weight(i) * a * a * std::log(a);
      mass2 += rule.weight(i) * a * a;
      const auto g = gradient(f, rule.node(i));
      double g2 = 0.0;
      for (double gi : g) g2 += gi * gi;
      energy += rule.weight(i) * g2;
    }
    Sides s;
    s.lhs = ent;
    // ||f||_2^2 log ||f||_2 = mass2 log(mass2) / 2
    s.rhs = energy + (mass2 > 0.0 ? 0.5 * mass2 * std::log(mass2) : 0.0);
    return s;
  });
  v.inputs["f"] = f.label;
  v.inputs["gradient"] = f.has_grad() ? "analytic" : "finite_difference";
  return v;
}

Verdict check_glsi(const GeneratorC& c, const TestFunction& f, const NumericOptions& opts) {
  if (!f.bounded_away_from_zero()) {
    throw PreconditionError("glsi needs f bounded away from zero; " + f.label + " has no positive lower bound");
  }
  std::string note;
  require_condition(c, Condition::C, opts, note);
  const GHPair gh(c, opts.integration_tol);
  Verdict v = two_level("glsi", Direction::LessEq, 0.0, f.dim, opts, [&](const SemigroupEval& se) {
    const QuadRule& rule = se.outer();
    const auto fv = values_on(rule, f);
    double h_mean = 0.0;
    double energy = 0.0;
    double g_mean = 0.0;
    for (std::size_t i = 0; i < fv.size(); ++i) {
      const double w = rule.weight(i);
      h_mean += w * gh.H(fv[i]);
      g_mean += w * gh.G(fv[i]);
      const auto g = gradient(f, rule.node(i));
      double g2 = 0.0;
      for (double gi : g) g2 += gi * gi;
      if (g2 > 0.0) energy += w * c.c_prime(fv[i]) * g2;
    }
    const InversionResult ginv = gh.G_inverse(g_mean);
    Sides s;
    s.lhs = h_mean;
    s.rhs = 0.5 * energy + gh.H(ginv.x);
    // |H'(x)| = |c log c| at the inverse point scales the inversion error.
    const double hprime = std::abs(c.c(ginv.x) * c.log_c(ginv.x));
    s.numeric_error = ginv.error_estimate * hprime + opts.integration_tol * (std::abs(s.lhs) + std::abs(s.rhs));
    return s;
  });
  v.note = note;
  v.inputs["c"] = c.label();
  v.inputs["f"] = f.label;
  return v;
}

Verdict check_rhc(const TestFunction& f, double alpha, double t, const NumericOptions& opts) {
  require_time(t, "rhc");
  if (!(alpha > 0.0)) throw ConfigError("rhc: alpha must be > 0");
  if (!f.positive) throw PreconditionError("rhc needs a positive f; " + f.label + " is not flagged positive");
  const double r = std::exp(2.0 * t) * (alpha + 1.0) - 1.0;
  Verdict v = two_level("rhc", Direction::LessEq, t, f.dim, opts, [&](const SemigroupEval& se) {
    Sides s;
    const auto& w = se.outer().weights();
    s.rhs = lp_norm_values(reciprocal(values_on(se.outer(), f)), w, alpha);
    s.lhs = t == 0.0 ? s.rhs : lp_norm_values(reciprocal(apply_Q_on_outer(se, f)), w, r);
    return s;
  });
  v.inputs["f"] = f.label;
  v.inputs["alpha"] = format_double(alpha);
  v.inputs["t"] = format_double(t);
  v.inputs["exponent"] = format_double(r);
  return v;
}

Verdict check_genrhc(const GeneratorC& c, const TestFunction& f, double t, const NumericOptions& opts) {
  require_time(t, "genrhc");
  if (!f.bounded_away_from_zero()) {
    throw PreconditionError("genrhc needs f bounded away from zero; " + f.label + " has no positive lower bound");
  }
  std::string note;
  require_condition(c, Condition::CPrime, opts, note);
  Verdict v = generalized("genrhc", Direction::GreaterEq, c, f, t, opts);
  v.note = note;
  return v;
}

Verdict check_ctmain(const TestFunction& f, double t, const NumericOptions& opts) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("ctmain: t must be > 0");
  if (!f.positive) throw PreconditionError("ctmain needs a positive f; " + f.label + " is not flagged positive");
  const double r = std::expm1(2.0 * t);
  Verdict v = two_level("ctmain", Direction::LessEq, t, f.dim, opts, [&](const SemigroupEval& se) {
    Sides s;
    const auto& w = se.outer().weights();
    s.rhs = 1.0 / log_mean_values(values_on(se.outer(), f), w);
    s.lhs = lp_norm_values(reciprocal(apply_Q_on_outer(se, f)), w, r);
    return s;
  });
  v.inputs["f"] = f.label;
  v.inputs["t"] = format_double(t);
  v.inputs["exponent"] = format_double(r);
  return v;
}

std::pair<Verdict, Verdict> check_sandwich(const TestFunction& f, double s, double t, const NumericOptions& opts) {
  if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("sandwich: s must be > 0");
  if (!(t >= 0.0) || !(t < s)) throw ConfigError("sandwich: t must lie in [0, s)");
  if (!f.nonnegative()) throw PreconditionError("sandwich needs a nonnegative f; " + f.label + " is not flagged so");
  const double r = -std::expm1(-2.0 * (s - t));

  struct Terms {
    double mass, middle, right;
  };
  auto terms = [&](int level) {
    const auto at_s = levels(s, f.dim, opts)[level];
    const auto at_t = levels(t, f.dim, opts)[level];
    const auto& w = at_s.outer().weights();
    Terms out{};
    out.mass = lp_norm_values(values_on(at_s.outer(), f), w, 1.0);
    out.middle = log_mean_values(apply_Q_on_outer(at_s, f), w);
    out.right = lp_norm_values(apply_Q_on_outer(at_t, f), w, r);
    return out;
  };
  const Terms fine = terms(0);
  const Terms coarse = terms(1);
  const double e_mass = std::abs(fine.mass - coarse.mass);
  const double e_mid = std::abs(fine.middle - coarse.middle);
  const double e_right = std::abs(fine.right - coarse.right);

  Verdict upper = make_verdict("sandwich_upper", Direction::GreaterEq, fine.mass, fine.middle,
                               std::max(e_mass, e_mid), opts);
  Verdict lower = make_verdict("sandwich_lower", Direction::GreaterEq, fine.middle, fine.right,
                               std::max(e_mid, e_right), opts);
  for (Verdict* v : {&upper, &lower}) {
    v->inputs["f"] = f.label;
    v->inputs["s"] = format_double(s);
    v->inputs["t"] = format_double(t);
    v->inputs["exponent"] = format_double(r);
  }
  return {upper, lower};
}

Verdict check_integrability_implication(const GeneratorC& c, const TestFunction& f, double t, double b,
                                        const NumericOptions& opts) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("integrability: t must be > 0");
  if (!f.nonnegative()) throw PreconditionError("integrability needs a nonnegative f; " + f.label);
  const double k = std::exp(2.0 * t);

  std::function<double(double)> premise;
  std::function<double(double)> conclusion;
  if (c.name == "exm1") {
    const double alpha = c.params.at("alpha");
    const double beta = c.params.at("beta");
    const double expo = k * (alpha + beta - 1.0) - beta + 1.0;
    premise = [=](double y) { return std::pow(y, alpha) * std::exp(std::pow(y, beta)); };
    conclusion = [=](double q) { return std::pow(q, expo) * std::exp(k * std::pow(q, beta)); };
  } else if (c.name == "loglog") {
    if (!(b > 1.0)) throw ConfigError("integrability: b must be > 1");
    const double alpha = c.params.at("alpha");
    const double beta = c.params.at("beta");
    premise = [=](double y) { return std::pow(y, alpha + 1.0) / std::pow(std::log(y + b), beta); };
    conclusion = [=](double q) { return std::pow(q, k * alpha + 1.0) / std::pow(std::log(q + b), k * beta); };
  } else {
    throw ConfigError("integrability implication is defined for the exm1 and loglog generators, not " + c.name);
  }

  std::string note;
  require_condition(c, Condition::C, opts, note);
  const auto lv = levels(t, f.dim, opts);
  std::array<double, 2> prem{};
  std::array<double, 2> conc{};
  for (int level = 0; level < 2; ++level) {
    const auto& w = lv[level].outer().weights();
    const auto fv = clamp_nonnegative(values_on(lv[level].outer(), f));
    const auto qv = clamp_nonnegative(apply_Q_on_outer(lv[level], f));
    double sp = 0.0;
    double sc = 0.0;
    for (std::size_t i = 0; i < fv.size(); ++i) {
      sp += w[i] * premise(fv[i]);
      sc += w[i] * conclusion(qv[i]);
    }
    prem[level] = sp;
    conc[level] = sc;
  }
  auto diverged = [](const std::array<double, 2>& m) {
    return !std::isfinite(m[0]) || std::abs(m[0] - m[1]) > 1e-2 * std::abs(m[0]);
  };
  if (diverged(prem)) throw EvaluationError("integrability: premise integral diverged for " + f.label);
  if (diverged(conc)) throw EvaluationError("integrability: conclusion integral diverged for " + f.label);

  const UPhi u_t = UPhi::at_time(c, t, opts.integration_tol);
  const UPhi u_0 = UPhi::at_time(c, 0.0, opts.integration_tol);
  Verdict v = two_level("integrability", Direction::LessEq, t, f.dim, opts, [&](const SemigroupEval& se) {
    Sides s;
    const auto& w = se.outer().weights();
    const auto fv = clamp_nonnegative(values_on(se.outer(), f));
    const auto qv = clamp_nonnegative(apply_Q_on_outer(se, f));
    double m0 = 0.0;
    double mt = 0.0;
    for (std::size_t i = 0; i < fv.size(); ++i) {
      m0 += w[i] * u_0.u(fv[i]);
      mt += w[i] * u_t.u(qv[i]);
    }
    const InversionResult x0 = u_0.phi(m0);
    s.lhs = mt;
    s.rhs = u_t.u(x0.x);
    s.numeric_error = x0.error_estimate * std::exp(k * c.log_c(x0.x)) +
                      opts.integration_tol * (std::abs(s.lhs) + std::abs(s.rhs));
    return s;
  });
  v.note = note;
  v.inputs["c"] = c.label();
  v.inputs["f"] = f.label;
  v.inputs["t"] = format_double(t);
  v.inputs["b"] = format_double(b);
  v.inputs["premise_integral"] = format_double(prem[0]);
  v.inputs["conclusion_integral"] = format_double(conc[0]);
  return v;
}

std::pair<double, double> fit_affine_majorant(const GeneratorC& c, const GridSpec& grid) {
  const auto xs = make_grid(grid);
  const std::size_t n = xs.size();
  const double r_last = c.ratio(xs[n - 1]);
  const double r_prev = c.ratio(xs[n - 2]);
  const double kappa1 = std::max((r_last - r_prev) / (xs[n - 1] - xs[n - 2]), 1e-12);
  double kappa2 = -std::numeric_limits<double>::infinity();
  for (double x : xs) kappa2 = std::max(kappa2, c.ratio(x) - kappa1 * x);
  return {kappa1, kappa2};
}

}  // namespace ouhyper
