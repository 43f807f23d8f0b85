#include "ouhyper/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <utility>

#include "ouhyper/error.hpp"

namespace ouhyper {

QuadRule::QuadRule(int order, int dim, std::vector<double> nodes, std::vector<double> weights)
    : order_(order), dim_(dim), nodes_(std::move(nodes)), weights_(std::move(weights)) {}

namespace {

// Orthonormal probabilists' Hermite recurrence:
//   p_{k+1} = (x p_k - sqrt(k) p_{k-1}) / sqrt(k+1).
// Returns p_n(x), p_n'(x) and sum_{k<n} p_k(x)^2.
struct HermiteEval {
  double value;
  double derivative;
  double christoffel_sum;
};

HermiteEval eval_orthonormal(int n, double x) {
  double prev = 0.0;
  double cur = 1.0;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += cur * cur;
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  // p_n' = sqrt(n) p_{n-1}
  return {cur, std::sqrt(static_cast<double>(n)) * prev, sum};
}

}  // namespace

void gauss_hermite_1d(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  const int n = order;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  Eigen::VectorXd eig = solver.eigenvalues();

  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = eig(i);
    for (int it = 0; it < 8; ++it) {
      const HermiteEval h = eval_orthonormal(n, x);
      if (h.derivative == 0.0) break;
      const double dx = h.value / h.derivative;
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    nodes[i] = x;
    weights[i] = 1.0 / eval_orthonormal(n, x).christoffel_sum;
  }

  // Enforce exact mirror symmetry, then unit mass.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (nodes[j] - nodes[i]);
    const double w = 0.5 * (weights[i] + weights[j]);
    nodes[i] = -x;
    nodes[j] = x;
    weights[i] = w;
    weights[j] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;

  // Sum from the smallest weights up.
  std::vector<double> sorted(weights);
  std::sort(sorted.begin(), sorted.end());
  const double mass = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  for (double& w : weights) w /= mass;
}

QuadRule build_rule(int order, int dim) {
  if (order < kMinOrder || order > kMaxOrder) {
    throw ConfigError("quadrature order " + std::to_string(order) + " outside [" +
                      std::to_string(kMinOrder) + ", " + std::to_string(kMaxOrder) + "]");
  }
  if (dim < 1 || dim > kMaxDim) {
    throw ConfigError("quadrature dimension " + std::to_string(dim) + " outside [1, " +
                      std::to_string(kMaxDim) + "]");
  }
  std::vector<double> x1;
  std::vector<double> w1;
  gauss_hermite_1d(order, x1, w1);

  std::size_t count = 1;
  for (int k = 0; k < dim; ++k) count *= static_cast<std::size_t>(order);

  std::vector<double> nodes(count * static_cast<std::size_t>(dim));
  std::vector<double> weights(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t rest = i;
    double w = 1.0;
    for (int k = dim - 1; k >= 0; --k) {
      const std::size_t idx = rest % static_cast<std::size_t>(order);
      rest /= static_cast<std::size_t>(order);
      nodes[i * dim + k] = x1[idx];
      w *= w1[idx];
    }
    weights[i] = w;
  }
  return QuadRule(order, dim, std::move(nodes), std::move(weights));
}

std::shared_ptr<const QuadRule> cached_rule(int order, int dim) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const QuadRule>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({order, dim});
    if (it != cache.end()) return it->second;
  }
  auto rule = std::make_shared<const QuadRule>(build_rule(order, dim));
  std::lock_guard lock(mutex);
  return cache.emplace(std::make_pair(order, dim), rule).first->second;
}

double integrate(const QuadRule& rule, const ScalarField& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = f(rule.node(i));
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrand not finite (" << v << ") at node " << i << " = (";
      for (int k = 0; k < rule.dim(); ++k) msg << (k ? ", " : "") << rule.node(i)[k];
      msg << ")";
      throw EvaluationError(msg.str());
    }
    sum += rule.weight(i) * v;
  }
  return sum;
}

namespace {

int default_order_cap(int dim) {
  switch (dim) {
    case 1: return 256;
    case 2: return 128;
    default: return 64;
  }
}

}  // namespace

IntegrationResult integrate_with_error(const ScalarField& f, int dim, double target_tol,
                                       int start_order, int max_order) {
  if (!(target_tol > 0.0)) throw ConfigError("integrate_with_error: target_tol must be > 0");
  if (max_order <= 0) max_order = default_order_cap(dim);
  max_order = std::min(max_order, kMaxOrder);
  start_order = std::clamp(start_order, kMinOrder, max_order);

  IntegrationResult result;
  int n = start_order;
  double coarse = integrate(*cached_rule(n, dim), f);
  result.value = coarse;
  result.order = n;
  while (2 * n <= max_order) {
    const double fine = integrate(*cached_rule(2 * n, dim), f);
    result.value = fine;
    result.order = 2 * n;
    result.error_estimate = std::abs(fine - coarse);
    if (result.error_estimate <= target_tol) {
      result.converged = true;
      return result;
    }
    coarse = fine;
    n *= 2;
  }
  return result;
}

}  // namespace ouhyper
