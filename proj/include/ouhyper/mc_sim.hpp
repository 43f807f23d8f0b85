#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ouhyper/functions.hpp"
#include "ouhyper/inequalities.hpp"
#include "ouhyper/quadrature.hpp"

namespace ouhyper {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Brownian ensemble. Path i draws its normals from a stream keyed by
/// (seed, i), so results do not depend on the thread count.
struct EnsembleSpec {
  std::size_t n_paths = 100000;
  std::uint64_t seed = kDefaultSeed;
  int dim = 1;
  std::shared_ptr<const QuadRule> inner_rule;  // null selects default_order(dim)
  int threads = 0;

  std::shared_ptr<const QuadRule> rule() const;
};

/// Samples of M_t(f) = E[f(W_1) | F_t] = E[f(W_{1-t} + x)] at x = W_t.
struct MartingaleSample {
  double t = 1.0;
  std::vector<double> values;
  EnsembleSpec spec;
};

/// Standard normal vector of path i (dim entries).
std::vector<double> path_normals(std::uint64_t seed, std::size_t path, int dim);

/// M_t(f) for t in (0, 1]. The conditional expectation over W_{1-t} is a
/// quadrature against N(0, (1-t) I); at t = 1 the samples are f(W_1).
MartingaleSample simulate_M(const TestFunction& f, double t, const EnsembleSpec& spec);

struct SampleStats {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Mean and standard error of g(values).
SampleStats sample_stats(const std::vector<double>& values);

struct MomentComparison {
  int k = 1;
  double quadrature = 0.0;
  double monte_carlo = 0.0;
  double standard_error = 0.0;
  double z = 0.0;  // |difference| / standard_error (0 when both agree exactly)
  bool passed = false;
};

struct IdentityReport {
  double t = 0.0;
  double tau = 1.0;  // e^{-2t}
  std::string f_label;
  std::vector<MomentComparison> moments;
  bool passed = false;
};

/// Moments 1..3 of Q_t f under gamma_d (quadrature on `rule`) against the
/// sample moments of M_{e^{-2t}}(f). A moment passes when the difference
/// is below 4 standard errors.
IdentityReport check_identity_in_law(const TestFunction& f, double t, const EnsembleSpec& spec,
                                     const QuadRule& rule);

struct McCurvePoint {
  double tau = 1.0;
  double mean_u = 0.0;  // sample mean of U(tau, M_tau)
  double standard_error = 0.0;
  double value = 0.0;  // V(tau, mean_u)
  double lo = 0.0;     // V at mean_u - 4 SE
  double hi = 0.0;     // V at mean_u + 4 SE
};

/// tau -> V(tau, E[U(tau, M_tau(f))]) with U(tau, x) = int_0^x c^{1/tau},
/// which must be nondecreasing in tau up to tau = 1.
struct McCurve {
  std::vector<McCurvePoint> points;
  bool chain_holds = true;
  /// phi(0, ||u(0, f)||_1) by quadrature, the value expected at tau = 1.
  double quadrature_endpoint = 0.0;
  bool endpoint_matches = true;
};

McCurve mc_genhc(const GeneratorC& c, const TestFunction& f, const std::vector<double>& tau_grid,
                 const EnsembleSpec& spec, const NumericOptions& opts = {});

}  // namespace ouhyper
