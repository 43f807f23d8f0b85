#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace ouhyper {

using Point = std::span<const double>;
using ScalarField = std::function<double(Point)>;

/// Tensor Gauss-Hermite rule for the standard Gaussian measure on R^dim
/// (probabilists' weight, weights sum to one).
class QuadRule {
 public:
  QuadRule(int order, int dim, std::vector<double> nodes, std::vector<double> weights);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return weights_.size(); }

  Point node(std::size_t i) const {
    return {nodes_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  int order_;
  int dim_;
  std::vector<double> nodes_;  // row-major, size() x dim
  std::vector<double> weights_;
};

inline constexpr int kMinOrder = 2;
inline constexpr int kMaxOrder = 256;
inline constexpr int kMaxDim = 3;

/// One-dimensional probabilists' Gauss-Hermite nodes and weights.
///
/// Nodes come from the Jacobi matrix eigenvalues (Golub-Welsch), polished by
/// Newton steps on the orthonormal recurrence; weights are the Christoffel
/// numbers 1 / sum_k p_k(x)^2, which keeps tail weights accurate in relative
/// terms up to order 256.
void gauss_hermite_1d(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// Builds the tensor rule. Throws ConfigError when order is outside
/// [2, 256] or dim outside [1, 3].
QuadRule build_rule(int order, int dim);

/// Shared, immutable rule from a process-wide cache.
std::shared_ptr<const QuadRule> cached_rule(int order, int dim);

/// sum_i w_i f(x_i). Throws EvaluationError naming the node when f is not
/// finite there.
double integrate(const QuadRule& rule, const ScalarField& f);

struct IntegrationResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int order = 0;  // finest order used
  bool converged = false;
};

/// Order-doubling integration (8, 16, ..., cap) until two consecutive
/// values differ by at most target_tol. On non-convergence the result
/// carries the finest value and the last difference with converged = false.
IntegrationResult integrate_with_error(const ScalarField& f, int dim, double target_tol,
                                       int start_order = 8, int max_order = 0);

}  // namespace ouhyper
