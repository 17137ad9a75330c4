#pragma once

// Generalized Gauss-Laguerre quadrature with weight x^alpha e^{-x}.
//
// Nodes start from the Golub-Welsch eigenvalues and are polished by Newton
// steps on L_n^(alpha). Weights come from
//   w_k = Gamma(n+alpha+1) x_k / (n! (n+1)^2 [L_{n+1}^(alpha)(x_k)]^2)
// evaluated in log space, so rules with hundreds of nodes (x_k ~ 10^3)
// neither overflow nor lose the tiny tail weights.

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

namespace uncertainty {

struct GaussLaguerreRule {
  double alpha = 0.0;
  std::vector<double> nodes;
  /// log of the weights w_k.
  std::vector<double> log_weights;
  /// w_k e^{x_k}: integrates f(x) x^alpha directly as sum scaled_k f(x_k).
  std::vector<double> scaled_weights;

  [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

namespace detail {

struct ScaledLaguerre {
  double current = 0.0;   // L_k scaled by exp(-log_scale)
  double previous = 0.0;  // L_{k-1} with the same scaling
  double log_scale = 0.0;
};

// Runs the three-term recurrence up to degree n, rescaling to stay finite.
inline ScaledLaguerre laguerre_scaled(int n, double alpha, double x) {
  constexpr double big = 1e150;
  const double log_big = std::log(big);
  ScaledLaguerre s{1.0, 0.0, 0.0};
  if (n == 0) return s;
  s.previous = 1.0;
  s.current = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * s.current - (k + alpha) * s.previous) / (k + 1.0);
    s.previous = s.current;
    s.current = next;
    if (std::abs(s.current) > big) {
      s.current /= big;
      s.previous /= big;
      s.log_scale += log_big;
    }
  }
  return s;
}

}  // namespace detail

inline GaussLaguerreRule make_gauss_laguerre(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
  if (!(alpha > -1.0)) throw std::invalid_argument("alpha must exceed -1");

  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(k * (k + alpha));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Golub-Welsch eigensolve failed");

  GaussLaguerreRule rule;
  rule.alpha = alpha;
  rule.nodes.resize(n);
  rule.log_weights.resize(n);
  rule.scaled_weights.resize(n);
  const double log_const = std::lgamma(n + alpha + 1.0) - std::lgamma(n + 1.0) - 2.0 * std::log(n + 1.0);

  for (int k = 0; k < n; ++k) {
    double x = solver.eigenvalues()(k);
    for (int it = 0; it < 8; ++it) {
      const auto s = detail::laguerre_scaled(n, alpha, x);
      // x L_n' = n L_n - (n + alpha) L_{n-1}; the common scale cancels.
      const double dx = x * s.current / (n * s.current - (n + alpha) * s.previous);
      x -= dx;
      if (std::abs(dx) <= 4e-16 * x) break;
    }
    const auto s = detail::laguerre_scaled(n, alpha, x);
    const double next = ((2.0 * n + 1.0 + alpha - x) * s.current - (n + alpha) * s.previous) / (n + 1.0);
    const double log_next = std::log(std::abs(next)) + s.log_scale;
    rule.nodes[k] = x;
    rule.log_weights[k] = log_const + std::log(x) - 2.0 * log_next;
    rule.scaled_weights[k] = std::exp(rule.log_weights[k] + x);
  }
  return rule;
}

/// Shared immutable rules with weight x^{1/2} e^{-x}, keyed by node count.
inline const GaussLaguerreRule& half_integer_laguerre_rule(int n) {
  static std::mutex mutex;
  static std::map<int, GaussLaguerreRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_laguerre(n, 0.5)).first;
  return it->second;
}

}  // namespace uncertainty
