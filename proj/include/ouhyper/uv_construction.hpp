#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "ouhyper/functions.hpp"

namespace ouhyper {

/// x -> int_0^x g(y) dy for an integrand that is bounded near 0.
///
/// The half-line is cut at geometric anchors 2^{k/2}; integrals between
/// consecutive anchors are computed once (adaptive Gauss-Kronrod) and
/// memoised, so a query costs one short panel from the nearest anchor
/// below. Returns +inf once the running integral overflows. Thread-safe.
class CumulativeIntegral {
 public:
  CumulativeIntegral(std::function<double(double)> integrand, double rel_tol);

  double operator()(double x) const;
  /// Integral over a single panel [a, b] with the same tolerance.
  double panel(double a, double b) const;

 private:
  static constexpr int kMinExp = -120;  // 2^{-60}
  static constexpr int kMaxExp = 100;   // 2^{50}
  static double anchor(int k);
  double anchored_value(int k) const;

  std::function<double(double)> integrand_;
  double rel_tol_;
  mutable std::mutex mutex_;
  mutable std::vector<double> cumulative_;  // cumulative_[i] = int_0^{anchor(kMinExp + i)}
};

struct InversionResult {
  double x = 0.0;
  double error_estimate = 0.0;  // half-width of the final bracket
};

/// Inverse of a strictly increasing F on (0, inf) with F(0+) = 0. The
/// bracket starts at [min(1, y), max(1, y)] and grows by a factor 4 up to
/// cap; the root is then refined by Illinois regula falsi safeguarded by
/// bisection. F may return +inf for overflow. Throws RangeError when y is
/// beyond F(cap).
InversionResult invert_increasing(const std::function<double(double)>& F, double y, double abs_tol,
                                  double cap);

/// u(t, x) = int_0^x c(y)^k dy and its inverse phi(t, .), where the power k
/// is e^{2t} (theorem time t) or 1/tau (martingale time tau). Powers are
/// evaluated as exp(k log c). Copies share one memo table.
class UPhi {
 public:
  static UPhi at_time(const GeneratorC& c, double t, double integration_tol = 1e-13,
                      double bracket_cap = 1e12);
  static UPhi at_martingale_time(const GeneratorC& c, double tau, double integration_tol = 1e-13,
                                 double bracket_cap = 1e12);

  double power() const noexcept { return power_; }
  double integration_tol() const noexcept { return integration_tol_; }
  double bracket_cap() const noexcept { return bracket_cap_; }
  const GeneratorC& generator() const noexcept { return *c_; }

  /// u(t, x); u(t, 0) = 0. Throws RangeError on overflow.
  double u(double x) const;
  /// u without the overflow check (may return +inf).
  double u_unchecked(double x) const;
  /// phi(t, ybar) with |u(x) - ybar| <= integration_tol (1 + ybar).
  InversionResult phi(double ybar) const;

 private:
  UPhi(const GeneratorC& c, double power, double integration_tol, double bracket_cap);

  std::shared_ptr<const GeneratorC> c_;
  double power_;
  double integration_tol_;
  double bracket_cap_;
  std::shared_ptr<CumulativeIntegral> integral_;
};

double eval_u(const UPhi& up, double x);
double eval_phi(const UPhi& up, double ybar);

/// G(x) = int_0^x c and H(x) = int_0^x c log c, with G^{-1}.
class GHPair {
 public:
  explicit GHPair(const GeneratorC& c, double integration_tol = 1e-13, double bracket_cap = 1e12);

  double G(double x) const;
  double H(double x) const;
  InversionResult G_inverse(double y) const;

 private:
  UPhi g_;
  std::shared_ptr<CumulativeIntegral> h_;
};

double eval_G(const GHPair& gh, double x);
double eval_H(const GHPair& gh, double x);
double eval_Ginv(const GHPair& gh, double y);

}  // namespace ouhyper
