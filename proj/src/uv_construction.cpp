#include "ouhyper/uv_construction.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "ouhyper/error.hpp"

namespace ouhyper {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> integrand, double rel_tol)
    : integrand_(std::move(integrand)), rel_tol_(rel_tol) {}

double CumulativeIntegral::anchor(int k) { return std::exp2(0.5 * k); }

double CumulativeIntegral::panel(double a, double b) const {
  if (!(b > a)) return 0.0;
  bool saw_pos_inf = false;
  bool saw_neg_inf = false;
  bool saw_nan = false;
  // Integrate over the unit interval: Boost's recursion compares an
  // unscaled error estimate with a length-scaled tolerance, which never
  // terminates early on short panels.
  const double width = b - a;
  auto guarded = [&](double s) {
    const double v = integrand_(a + width * s);
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) saw_nan = true;
    else if (v > 0) saw_pos_inf = true;
    else saw_neg_inf = true;
    return 0.0;
  };
  double error = 0.0;
  const double value =
      width * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(guarded, 0.0, 1.0, 15, rel_tol_, &error);
  if (saw_nan) {
    std::ostringstream msg;
    msg << "integrand not finite on [" << a << ", " << b << "]";
    throw EvaluationError(msg.str());
  }
  if (saw_pos_inf && !saw_neg_inf) return kInf;
  if (saw_neg_inf && !saw_pos_inf) return -kInf;
  if (saw_pos_inf) return std::numeric_limits<double>::quiet_NaN();
  return value;
}

double CumulativeIntegral::anchored_value(int k) const {
  std::lock_guard lock(mutex_);
  const std::size_t index = static_cast<std::size_t>(k - kMinExp);
  if (cumulative_.empty()) cumulative_.push_back(panel(0.0, anchor(kMinExp)));
  while (cumulative_.size() <= index) {
    const int next = kMinExp + static_cast<int>(cumulative_.size());
    cumulative_.push_back(cumulative_.back() + panel(anchor(next - 1), anchor(next)));
  }
  return cumulative_[index];
}

double CumulativeIntegral::operator()(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (x <= anchor(kMinExp)) return panel(0.0, x);
  int k = static_cast<int>(std::floor(2.0 * std::log2(x)));
  k = std::clamp(k, kMinExp, kMaxExp);
  while (k > kMinExp && anchor(k) > x) --k;
  const double base = anchored_value(k);
  if (!std::isfinite(base)) return base;
  return base + panel(anchor(k), x);
}

InversionResult invert_increasing(const std::function<double(double)>& F, double y, double abs_tol,
                                  double cap) {
  if (std::isnan(y) || y < 0.0) throw RangeError("inverse requested at a negative or NaN value");
  if (y == 0.0) return {0.0, 0.0};
  if (!std::isfinite(y)) throw RangeError("inverse requested at +inf");

  double lo = std::min(1.0, y);
  double hi = std::max(1.0, y);
  if (hi > cap) hi = cap;
  if (lo > hi) lo = hi;
  double f_lo = F(lo);
  while (f_lo > y) {
    hi = lo;
    lo *= 0.25;
    if (lo < 1e-300) return {lo, lo};
    f_lo = F(lo);
  }
  double f_hi = F(hi);
  while (f_hi < y) {
    if (hi >= cap) {
      std::ostringstream msg;
      msg << "value " << y << " is beyond the range of u within the bracket cap " << cap
          << " (u(cap) = " << f_hi << ")";
      throw RangeError(msg.str());
    }
    lo = hi;
    f_lo = f_hi;
    hi = std::min(4.0 * hi, cap);
    f_hi = F(hi);
  }
  if (std::abs(f_lo - y) <= abs_tol) return {lo, 0.0};
  if (std::abs(f_hi - y) <= abs_tol) return {hi, 0.0};

  // Illinois regula falsi on g = F - y with bisection fallback.
  double g_lo = f_lo - y;
  double g_hi = f_hi - y;
  int side = 0;
  double x = 0.5 * (lo + hi);
  double gx = 0.0;
  for (int iter = 0; iter < 400; ++iter) {
    const double width = hi - lo;
    const bool finite_ends = std::isfinite(g_hi) && std::isfinite(g_lo);
    const bool force_bisect = !finite_ends || iter % 4 == 3;
    if (force_bisect) {
      x = (hi > 4.0 * lo && lo > 0.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    } else {
      x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    }
    gx = F(x) - y;
    if (std::abs(gx) <= abs_tol) break;
    if (gx < 0.0) {
      lo = x;
      g_lo = gx;
      if (side == -1) g_hi *= 0.5;
      side = -1;
    } else {
      hi = x;
      g_hi = gx;
      if (side == +1) g_lo *= 0.5;
      side = +1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi || (hi - lo >= width && iter > 300)) {
      x = 0.5 * (lo + hi);
      break;
    }
  }
  // Residual over the local slope, never smaller than the rounding floor.
  double estimate = std::numeric_limits<double>::epsilon() * x;
  const double slope = (f_hi - f_lo) / (hi - lo);
  if (std::isfinite(slope) && slope > 0.0) estimate = std::max(estimate, std::abs(gx) / slope);
  else estimate = std::max(estimate, hi - lo);
  return {x, estimate};
}

UPhi::UPhi(const GeneratorC& c, double power, double integration_tol, double bracket_cap)
    : c_(std::make_shared<const GeneratorC>(c)),
      power_(power),
      integration_tol_(integration_tol),
      bracket_cap_(bracket_cap) {
  if (!(integration_tol_ > 0.0)) throw ConfigError("integration_tol must be > 0");
  if (!(bracket_cap_ > 1.0)) throw ConfigError("bracket_cap must be > 1");
  auto gen = c_;
  const double k = power_;
  integral_ = std::make_shared<CumulativeIntegral>(
      [gen, k](double y) { return std::exp(k * gen->log_c(y)); }, integration_tol_);
}

UPhi UPhi::at_time(const GeneratorC& c, double t, double integration_tol, double bracket_cap) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("u(t, .) needs finite t >= 0");
  return UPhi(c, std::exp(2.0 * t), integration_tol, bracket_cap);
}

UPhi UPhi::at_martingale_time(const GeneratorC& c, double tau, double integration_tol, double bracket_cap) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("martingale time must be > 0");
  return UPhi(c, 1.0 / tau, integration_tol, bracket_cap);
}

double UPhi::u_unchecked(double x) const { return (*integral_)(x); }

double UPhi::u(double x) const {
  if (std::isnan(x) || x < 0.0) throw RangeError("u(t, x) needs x >= 0");
  const double v = u_unchecked(x);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "u(t, " << x << ") overflows for " << c_->label() << " at power " << power_;
    throw RangeError(msg.str());
  }
  return v;
}

InversionResult UPhi::phi(double ybar) const {
  return invert_increasing([this](double x) { return u_unchecked(x); }, ybar,
                           integration_tol_ * (1.0 + ybar), bracket_cap_);
}

double eval_u(const UPhi& up, double x) { return up.u(x); }
double eval_phi(const UPhi& up, double ybar) { return up.phi(ybar).x; }

GHPair::GHPair(const GeneratorC& c, double integration_tol, double bracket_cap)
    : g_(UPhi::at_time(c, 0.0, integration_tol, bracket_cap)) {
  auto gen = std::make_shared<const GeneratorC>(c);
  h_ = std::make_shared<CumulativeIntegral>(
      [gen](double y) {
        const double lc = gen->log_c(y);
        const double cv = std::exp(lc);
        return cv == 0.0 ? 0.0 : cv * lc;
      },
      integration_tol);
}

double GHPair::G(double x) const { return g_.u(x); }

double GHPair::H(double x) const {
  if (std::isnan(x) || x < 0.0) throw RangeError("H(x) needs x >= 0");
  const double v = (*h_)(x);
  if (!std::isfinite(v)) throw RangeError("H(x) overflows");
  return v;
}

InversionResult GHPair::G_inverse(double y) const { return g_.phi(y); }

double eval_G(const GHPair& gh, double x) { return gh.G(x); }
double eval_H(const GHPair& gh, double x) { return gh.H(x); }
double eval_Ginv(const GHPair& gh, double y) { return gh.G_inverse(y).x; }

}  // namespace ouhyper
