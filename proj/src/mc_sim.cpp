#include "ouhyper/mc_sim.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>

#include "ouhyper/error.hpp"
#include "ouhyper/ou_operator.hpp"
#include "ouhyper/parallel.hpp"
#include "ouhyper/uv_construction.hpp"

namespace ouhyper {

std::shared_ptr<const QuadRule> EnsembleSpec::rule() const {
  return inner_rule ? inner_rule : cached_rule(default_order(dim), dim);
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void validate(const EnsembleSpec& spec) {
  if (spec.n_paths < 2) throw ConfigError("ensemble needs at least 2 paths");
  if (spec.dim < 1 || spec.dim > kMaxDim) throw ConfigError("ensemble dim must be in 1..3");
  if (spec.inner_rule && spec.inner_rule->dim() != spec.dim) throw ConfigError("inner rule dim mismatch");
}

}  // namespace

std::vector<double> path_normals(std::uint64_t seed, std::size_t path, int dim) {
  std::uint64_t key = seed;
  std::uint64_t state = splitmix64(key) ^ (0xD1B54A32D192ED03ULL * (static_cast<std::uint64_t>(path) + 1));
  std::vector<double> z(dim);
  for (int k = 0; k < dim; ++k) {
    // 53 random bits mapped to the open interval (0, 1).
    const double u = (static_cast<double>(splitmix64(state) >> 11) + 0.5) * 0x1p-53;
    z[k] = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
  }
  return z;
}

MartingaleSample simulate_M(const TestFunction& f, double t, const EnsembleSpec& spec) {
  validate(spec);
  if (!(t > 0.0 && t <= 1.0)) throw ConfigError("simulate_M: t must lie in (0, 1]");
  if (f.dim != spec.dim) throw ConfigError("simulate_M: f and ensemble dims differ");
  const auto rule_ptr = spec.rule();
  const QuadRule& rule = *rule_ptr;
  const int d = spec.dim;
  const double sd_t = std::sqrt(t);
  const double sd_rest = std::sqrt(1.0 - t);

  MartingaleSample out;
  out.t = t;
  out.spec = spec;
  out.values.assign(spec.n_paths, 0.0);
  parallel_for(spec.n_paths, worker_count(spec.threads), [&](std::size_t i) {
    const auto z = path_normals(spec.seed, i, d);
    std::vector<double> x(d);
    for (int k = 0; k < d; ++k) x[k] = sd_t * z[k];
    if (t == 1.0) {
      out.values[i] = f(x);
      if (!std::isfinite(out.values[i])) throw EvaluationError("f = " + f.label + " not finite on a path");
      return;
    }
    std::vector<double> shifted(d);
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const Point y = rule.node(j);
      for (int k = 0; k < d; ++k) shifted[k] = x[k] + sd_rest * y[k];
      const double v = f(shifted);
      if (!std::isfinite(v)) throw EvaluationError("f = " + f.label + " not finite at a shifted node");
      sum += rule.weight(j) * v;
    }
    out.values[i] = sum;
  });
  return out;
}

SampleStats sample_stats(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) throw ConfigError("sample_stats needs at least 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

IdentityReport check_identity_in_law(const TestFunction& f, double t, const EnsembleSpec& spec,
                                     const QuadRule& rule) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("identity in law: t must be finite and >= 0");
  IdentityReport report;
  report.t = t;
  report.tau = std::exp(-2.0 * t);
  report.f_label = f.label;
  if (!(report.tau > 0.0)) throw RangeError("identity in law: e^{-2t} underflows");

  const SemigroupEval se(t, spec.rule(),
                         std::shared_ptr<const QuadRule>(std::shared_ptr<const QuadRule>{}, &rule));
  const auto q = apply_Q_on_outer(se, f);
  const MartingaleSample sample = simulate_M(f, report.tau, spec);

  report.passed = true;
  for (int k = 1; k <= 3; ++k) {
    MomentComparison m;
    m.k = k;
    for (std::size_t i = 0; i < q.size(); ++i) m.quadrature += rule.weight(i) * std::pow(q[i], k);
    std::vector<double> powers(sample.values.size());
    std::transform(sample.values.begin(), sample.values.end(), powers.begin(),
                   [k](double v) { return std::pow(v, k); });
    const SampleStats s = sample_stats(powers);
    m.monte_carlo = s.mean;
    m.standard_error = s.standard_error;
    const double diff = std::abs(m.quadrature - m.monte_carlo);
    // The floor absorbs quadrature rounding when the samples are degenerate.
    const double floor = 1e-10 * std::max(1.0, std::abs(m.quadrature));
    m.z = s.standard_error > 0.0 ? diff / s.standard_error : (diff <= floor ? 0.0 : std::numeric_limits<double>::infinity());
    m.passed = diff < 4.0 * s.standard_error + floor;
    report.passed = report.passed && m.passed;
    report.moments.push_back(m);
  }
  return report;
}

McCurve mc_genhc(const GeneratorC& c, const TestFunction& f, const std::vector<double>& tau_grid,
                 const EnsembleSpec& spec, const NumericOptions& opts) {
  if (tau_grid.empty()) throw ConfigError("mc_genhc: empty time grid");
  if (!std::is_sorted(tau_grid.begin(), tau_grid.end())) throw ConfigError("mc_genhc: time grid must be ascending");
  for (double tau : tau_grid) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("mc_genhc: times must lie in (0, 1]");
  }
  if (!f.nonnegative()) throw PreconditionError("mc_genhc needs a nonnegative f; " + f.label);
  const ConditionReport cond = check_condition_C(c, opts.condition_grid);
  if (!cond.passed && opts.enforce_conditions) throw PreconditionError(cond.summary);

  McCurve curve;
  for (double tau : tau_grid) {
    const MartingaleSample sample = simulate_M(f, tau, spec);
    const UPhi up = UPhi::at_martingale_time(c, tau, opts.integration_tol);
    std::vector<double> u(sample.values.size());
    parallel_for(u.size(), worker_count(spec.threads),
                 [&](std::size_t i) { u[i] = up.u(std::max(sample.values[i], 0.0)); });
    const SampleStats s = sample_stats(u);
    McCurvePoint p;
    p.tau = tau;
    p.mean_u = s.mean;
    p.standard_error = s.standard_error;
    p.value = up.phi(s.mean).x;
    p.lo = up.phi(std::max(s.mean - 4.0 * s.standard_error, 0.0)).x;
    p.hi = up.phi(s.mean + 4.0 * s.standard_error).x;
    curve.points.push_back(p);
  }
  const double tol = opts.slack_floor;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    for (std::size_t j = i + 1; j < curve.points.size(); ++j) {
      const auto& a = curve.points[i];
      const auto& b = curve.points[j];
      if (a.lo > b.hi + tol * std::max(1.0, std::abs(b.hi))) curve.chain_holds = false;
    }
  }

  const Verdict at_zero = check_genhc(c, f, 0.0, opts);
  curve.quadrature_endpoint = at_zero.rhs;
  const auto& last = curve.points.back();
  if (last.tau == 1.0) {
    const double tol_end = tol * std::max(1.0, std::abs(curve.quadrature_endpoint)) + at_zero.slack;
    curve.endpoint_matches =
        curve.quadrature_endpoint >= last.lo - tol_end && curve.quadrature_endpoint <= last.hi + tol_end;
  }
  return curve;
}

}  // namespace ouhyper
