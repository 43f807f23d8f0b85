#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "ouhyper/error.hpp"
#include "ouhyper/functions.hpp"

namespace ouhyper {

std::string GeneratorC::label() const {
  std::ostringstream out;
  out << name;
  char sep = ':';
  for (const auto& [key, value] : params) {
    out << sep << key << '=' << value;
    sep = ',';
  }
  return out.str();
}

namespace {

double param(const ParamMap& params, const std::string& family, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError(family + ": missing parameter '" + key + "'");
  if (!std::isfinite(it->second)) throw ConfigError(family + ": parameter '" + key + "' not finite");
  return it->second;
}

void reject_unknown(const ParamMap& params, const std::string& family,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : params) {
    if (!allowed.count(key)) throw ConfigError(family + ": unknown parameter '" + key + "'");
  }
}

// u and its inverse for c(x) = (x + kappa)^{-m} with time exponent k = e^{2t}:
// u(t, x) = (kappa^{-r} - (x + kappa)^{-r}) / r with r = m k - 1 (log form when r = 0).
void attach_shifted_power_closed_forms(GeneratorC& g, double m, double kappa) {
  g.closed_form_u = [m, kappa](double t, double x) {
    const double r = m * std::exp(2.0 * t) - 1.0;
    if (r == 0.0) return std::log1p(x / kappa);
    // -(a^{-r} - b^{-r}) / r with a = kappa, b = x + kappa, via expm1 for accuracy.
    const double log_a = std::log(kappa);
    const double log_b = std::log(x + kappa);
    return -std::exp(-r * log_a) * std::expm1(-r * (log_b - log_a)) / r;
  };
  g.closed_form_phi = [m, kappa](double t, double y) {
    const double r = m * std::exp(2.0 * t) - 1.0;
    if (r == 0.0) return kappa * std::expm1(y);
    const double base = std::pow(kappa, -r) - r * y;
    if (!(base > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return std::pow(base, -1.0 / r) - kappa;
  };
}

}  // namespace

GeneratorC builtin_c(const std::string& name, const ParamMap& params) {
  GeneratorC g;
  g.name = name;
  g.params = params;

  if (name == "power") {
    reject_unknown(params, name, {"p"});
    const double p = param(params, name, "p");
    if (!(p > 1.0)) throw ConfigError("power: p must be > 1");
    const double e = p - 1.0;
    g.c = [e](double x) { return std::pow(x, e); };
    g.c_prime = [e](double x) { return e * std::pow(x, e - 1.0); };
    g.log_c = [e](double x) { return e * std::log(x); };
    g.dlog_c = [e](double x) { return e / x; };
    g.closed_form_u = [e](double t, double x) {
      const double q = std::exp(2.0 * t) * e + 1.0;
      return std::pow(x, q) / q;
    };
    g.closed_form_phi = [e](double t, double y) {
      const double q = std::exp(2.0 * t) * e + 1.0;
      return std::pow(q * y, 1.0 / q);
    };
  } else if (name == "exp") {
    reject_unknown(params, name, {});
    g.c = [](double x) { return std::exp(x); };
    g.c_prime = [](double x) { return std::exp(x); };
    g.log_c = [](double x) { return x; };
    g.dlog_c = [](double) { return 1.0; };
    g.closed_form_u = [](double t, double x) {
      const double k = std::exp(2.0 * t);
      return std::expm1(k * x) / k;
    };
    g.closed_form_phi = [](double t, double y) {
      const double k = std::exp(2.0 * t);
      return std::log1p(k * y) / k;
    };
  } else if (name == "exm1") {
    reject_unknown(params, name, {"alpha", "beta"});
    const double alpha = param(params, name, "alpha");
    const double beta = param(params, name, "beta");
    if (!(beta > 0.0)) throw ConfigError("exm1: beta must be > 0");
    const double rho = alpha + beta - 1.0;
    g.c = [rho, beta](double x) { return std::pow(x, rho) * std::exp(std::pow(x, beta)); };
    g.c_prime = [rho, beta](double x) {
      return (rho * std::pow(x, rho - 1.0) + beta * std::pow(x, rho + beta - 1.0)) *
             std::exp(std::pow(x, beta));
    };
    g.log_c = [rho, beta](double x) { return rho * std::log(x) + std::pow(x, beta); };
    g.dlog_c = [rho, beta](double x) { return rho / x + beta * std::pow(x, beta - 1.0); };
  } else if (name == "loglog") {
    reject_unknown(params, name, {"alpha", "beta", "a"});
    const double alpha = param(params, name, "alpha");
    const double beta = param(params, name, "beta");
    const double a = param(params, name, "a");
    if (!(alpha > 0.0) || !(beta > 0.0)) throw ConfigError("loglog: alpha and beta must be > 0");
    const double a_min = std::exp(2.0 + beta / alpha);
    if (a < a_min * (1.0 - 1e-12)) {
      std::ostringstream msg;
      msg << "loglog: a = " << a << " violates a >= e^{2+beta/alpha} = " << a_min;
      throw ConfigError(msg.str());
    }
    g.c = [=](double x) { return std::pow(x + a, alpha) / std::pow(std::log(x + a), beta); };
    g.c_prime = [=](double x) {
      const double l = std::log(x + a);
      return alpha * std::pow(x + a, alpha - 1.0) / std::pow(l, beta + 1.0) * (l - beta / alpha);
    };
    g.log_c = [=](double x) { return alpha * std::log(x + a) - beta * std::log(std::log(x + a)); };
    g.dlog_c = [=](double x) {
      const double l = std::log(x + a);
      return alpha / (x + a) - beta / ((x + a) * l);
    };
  } else if (name == "inv_power" || name == "inv_shift" || name == "inv_shift_pow") {
    double m = 0.0;
    double kappa = 0.0;
    if (name == "inv_power") {
      reject_unknown(params, name, {"alpha", "kappa"});
      const double alpha = param(params, name, "alpha");
      if (!(alpha > 0.0)) throw ConfigError("inv_power: alpha must be > 0");
      m = alpha + 1.0;
      kappa = param(params, name, "kappa");
    } else if (name == "inv_shift") {
      reject_unknown(params, name, {"kappa"});
      m = 1.0;
      kappa = param(params, name, "kappa");
    } else {
      reject_unknown(params, name, {"s", "kappa"});
      const double s = param(params, name, "s");
      if (!(s > 0.0)) throw ConfigError("inv_shift_pow: s must be > 0");
      m = std::exp(-2.0 * s);
      kappa = param(params, name, "kappa");
    }
    if (!(kappa > 0.0)) throw ConfigError(name + ": kappa must be > 0");
    g.c = [m, kappa](double x) { return std::pow(x + kappa, -m); };
    g.c_prime = [m, kappa](double x) { return -m * std::pow(x + kappa, -m - 1.0); };
    g.log_c = [m, kappa](double x) { return -m * std::log(x + kappa); };
    g.dlog_c = [m, kappa](double x) { return -m / (x + kappa); };
    attach_shifted_power_closed_forms(g, m, kappa);
  } else if (name == "exp_decay") {
    reject_unknown(params, name, {"kappa"});
    const double kappa = param(params, name, "kappa");
    if (!(kappa >= 0.0)) throw ConfigError("exp_decay: kappa must be >= 0");
    g.c = [kappa](double x) { return std::exp(kappa - x); };
    g.c_prime = [kappa](double x) { return -std::exp(kappa - x); };
    g.log_c = [kappa](double x) { return kappa - x; };
    g.dlog_c = [](double) { return -1.0; };
    g.closed_form_u = [kappa](double t, double x) {
      const double k = std::exp(2.0 * t);
      return -std::exp(k * kappa) * std::expm1(-k * x) / k;
    };
    g.closed_form_phi = [kappa](double t, double y) {
      const double k = std::exp(2.0 * t);
      return -std::log1p(-k * y * std::exp(-k * kappa)) / k;
    };
  } else {
    throw ConfigError("unknown generator family '" + name + "'");
  }
  return g;
}

GeneratorC generator_from_spec(const std::string& spec) {
  auto [name, params] = parse_family_spec(spec);
  return builtin_c(name, params);
}

}  // namespace ouhyper
