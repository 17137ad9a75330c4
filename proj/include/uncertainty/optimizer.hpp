#pragma once

// Direct minimization of <r^2><p^2> over truncated oscillator expansions
// under the normalization, <L^2> and <L^4> constraints.
//
// Amplitudes are real (all quadratic forms have real matrix elements, so
// phases cannot lower the product) and the basis keeps m = 0 only (every
// form is identical on each m block). The solver is an augmented
// Lagrangian: an inner quasi-Newton descent with Armijo backtracking on
//   f(c) - sum_k lambda_k g_k(c) + (mu/2) sum_k g_k(c)^2,
// followed by first-order multiplier updates lambda_k -= mu g_k.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "uncertainty/basis.hpp"
#include "uncertainty/bounds.hpp"
#include "uncertainty/constraints.hpp"
#include "uncertainty/oracle.hpp"

namespace uncertainty {

struct QuadraticForms {
  int n_max = 0;
  int l_max = 0;
  /// Basis order: index = l (n_max + 1) + n, all m = 0.
  std::vector<QuantumNumbers> basis;
  Eigen::MatrixXd A;   // r^2
  Eigen::MatrixXd B;   // p^2
  Eigen::VectorXd D2;  // diagonal of L^2
  Eigen::VectorXd D4;  // diagonal of L^4

  [[nodiscard]] Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(basis.size()); }
  [[nodiscard]] Eigen::Index index(int n, int l) const noexcept {
    return static_cast<Eigen::Index>(l) * (n_max + 1) + n;
  }
};

inline constexpr double form_validation_tolerance = 1e-9;

/// Builds A, B, D2, D4 and cross-checks every structurally nonzero entry of
/// A and B that lies within the radial oracle's range against quadrature.
inline QuadraticForms build_quadratic_forms(int n_max, int l_max, bool validate = true) {
  if (n_max < 0 || l_max < 0) throw std::invalid_argument("truncation needs n_max >= 0 and l_max >= 0");
  QuadraticForms q;
  q.n_max = n_max;
  q.l_max = l_max;
  for (int l = 0; l <= l_max; ++l)
    for (int n = 0; n <= n_max; ++n) q.basis.push_back({n, l, 0});
  const auto d = q.dim();
  q.A = Eigen::MatrixXd::Zero(d, d);
  q.B = Eigen::MatrixXd::Zero(d, d);
  q.D2.resize(d);
  q.D4.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& a = q.basis[static_cast<std::size_t>(i)];
    q.D2(i) = a.l_squared();
    q.D4(i) = a.l_squared() * a.l_squared();
    for (int dn = -1; dn <= 1; ++dn) {
      const int n = a.n + dn;
      if (n < 0 || n > n_max) continue;
      const auto j = q.index(n, a.l);
      const auto& b = q.basis[static_cast<std::size_t>(j)];
      q.A(i, j) = r2_element(a, b);
      q.B(i, j) = p2_element(a, b);
    }
  }
  if (validate) {
    const auto& rule = half_integer_laguerre_rule(128);
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto& a = q.basis[static_cast<std::size_t>(i)];
      if (a.n > max_radial_n || a.l > max_radial_l) continue;
      for (Eigen::Index j = i; j < d; ++j) {
        if (q.A(i, j) == 0.0 && q.B(i, j) == 0.0) continue;
        const auto& b = q.basis[static_cast<std::size_t>(j)];
        if (b.n > max_radial_n) continue;
        const auto e = radial_elements(a, b, rule);
        if (std::abs(e.r2 - q.A(i, j)) > form_validation_tolerance ||
            std::abs(e.p2 - q.B(i, j)) > form_validation_tolerance)
          throw std::logic_error("analytic matrix element disagrees with quadrature at " +
                                 to_string(a) + ", " + to_string(b));
      }
    }
  }
  return q;
}

struct OptimizeProblem {
  double L2_target = 0.0;
  double R_target = 0.0;
  int n_max = 2;
  /// 0 selects default_l_max(L2_target, R_target).
  int l_max = 0;
  int restarts = 20;
  std::uint64_t seed = 20100601;
  double tolerance = 1e-8;
  int max_inner_iterations = 10000;
  /// Quasi-Newton history length; 0 gives steepest descent.
  int memory = 8;
};

struct RestartStats {
  int run = 0;
  int converged = 0;
  double warm_start_product = std::numeric_limits<double>::quiet_NaN();
  /// Converged random restarts that beat the warm start by more than 1e-6.
  int below_warm_start = 0;
  /// Converged restarts that stalled more than 1e-6 above the best.
  int spurious_minima = 0;
  std::vector<double> products;
  std::vector<bool> converged_flags;
};

struct OptimizeResult {
  double best_product = std::numeric_limits<double>::quiet_NaN();
  SuperpositionState best_state;
  /// |c.c - 1|, |<L^2> - L2| / max(1, L2), |<L^4> - F| / max(1, F).
  std::array<double, 3> constraint_residuals{0.0, 0.0, 0.0};
  bool converged = false;
  RestartStats restarts;
};

namespace detail {

class ProductObjective {
 public:
  ProductObjective(const QuadraticForms& forms, double L2, double F)
      : A_(forms.A.sparseView()), B_(forms.B.sparseView()), D2_(forms.D2), D4_(forms.D4),
        L2_(L2), F_(F), s2_(std::max(1.0, L2)), s4_(std::max(1.0, F)) {}

  struct Eval {
    double f = 0.0;
    Eigen::VectorXd grad_f;
    std::array<double, 3> g{};
    std::array<Eigen::VectorXd, 3> grad_g;
  };

  [[nodiscard]] Eval evaluate(const Eigen::VectorXd& c) const {
    Eval e;
    const Eigen::VectorXd Ac = A_ * c;
    const Eigen::VectorXd Bc = B_ * c;
    const double x2 = c.dot(Ac);
    const double p2 = c.dot(Bc);
    e.f = x2 * p2;
    e.grad_f = 2.0 * p2 * Ac + 2.0 * x2 * Bc;
    const Eigen::VectorXd D2c = D2_.cwiseProduct(c);
    const Eigen::VectorXd D4c = D4_.cwiseProduct(c);
    e.g = {c.squaredNorm() - 1.0, (c.dot(D2c) - L2_) / s2_, (c.dot(D4c) - F_) / s4_};
    e.grad_g = {2.0 * c, 2.0 / s2_ * D2c, 2.0 / s4_ * D4c};
    return e;
  }

  [[nodiscard]] double augmented(const Eval& e, const Eigen::Vector3d& lambda, double mu,
                                 Eigen::VectorXd* grad) const {
    double value = e.f;
    if (grad) *grad = e.grad_f;
    for (int k = 0; k < 3; ++k) {
      value += -lambda(k) * e.g[k] + 0.5 * mu * e.g[k] * e.g[k];
      if (grad) *grad += (mu * e.g[k] - lambda(k)) * e.grad_g[k];
    }
    return value;
  }

  /// Least-squares multipliers and the norm of the gradient component
  /// tangent to the constraint manifold.
  [[nodiscard]] std::pair<Eigen::Vector3d, double> projected(const Eval& e) const {
    Eigen::MatrixXd J(e.grad_f.size(), 3);
    for (int k = 0; k < 3; ++k) J.col(k) = e.grad_g[k];
    const Eigen::Vector3d lambda = J.completeOrthogonalDecomposition().solve(e.grad_f);
    return {lambda, (e.grad_f - J * lambda).norm()};
  }

  [[nodiscard]] std::array<double, 3> residuals(const Eval& e) const {
    return {std::abs(e.g[0]), std::abs(e.g[1]) * s2_ / std::max(1.0, L2_),
            std::abs(e.g[2]) * s4_ / std::max(1.0, F_)};
  }

 private:
  Eigen::SparseMatrix<double> A_;
  Eigen::SparseMatrix<double> B_;
  Eigen::VectorXd D2_;
  Eigen::VectorXd D4_;
  double L2_, F_, s2_, s4_;
};

struct RunOutcome {
  Eigen::VectorXd c;
  double product = std::numeric_limits<double>::infinity();
  std::array<double, 3> residuals{};
  bool converged = false;
};

inline RunOutcome augmented_lagrangian(const ProductObjective& obj, Eigen::VectorXd c,
                                       const OptimizeProblem& p) {
  auto e = obj.evaluate(c);
  Eigen::Vector3d lambda = obj.projected(e).first;
  double mu = 10.0;
  double previous_violation = std::numeric_limits<double>::infinity();
  int budget = p.max_inner_iterations;
  RunOutcome out;

  for (int outer = 0; outer < 100; ++outer) {
    const double scale = std::max(1.0, e.grad_f.norm());
    const double inner_tol = scale * std::max(0.1 * p.tolerance, 1e-2 * std::pow(0.1, outer));
    std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;
    Eigen::VectorXd grad;
    double value = obj.augmented(e, lambda, mu, &grad);
    double step_hint = 1.0;

    while (budget > 0 && grad.norm() > inner_tol) {
      --budget;
      // Two-loop recursion.
      Eigen::VectorXd dir = -grad;
      std::vector<double> alphas(history.size());
      for (std::size_t k = history.size(); k-- > 0;) {
        const auto& [s, y] = history[k];
        alphas[k] = s.dot(dir) / y.dot(s);
        dir -= alphas[k] * y;
      }
      if (!history.empty()) {
        const auto& [s, y] = history.back();
        dir *= s.dot(y) / y.squaredNorm();
      } else {
        dir *= step_hint / std::max(1.0, grad.norm());
      }
      for (std::size_t k = 0; k < history.size(); ++k) {
        const auto& [s, y] = history[k];
        dir += (alphas[k] - y.dot(dir) / y.dot(s)) * s;
      }
      double slope = grad.dot(dir);
      if (slope >= 0.0) {
        history.clear();
        dir = -grad / std::max(1.0, grad.norm());
        slope = grad.dot(dir);
      }

      // Armijo on values; near the minimum, where value differences drown in
      // rounding, a step that does not raise the value beyond rounding and
      // shrinks the gradient is accepted instead.
      const double noise = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(value));
      double t = 1.0;
      Eigen::VectorXd trial;
      Eigen::VectorXd trial_grad;
      decltype(e) trial_eval;
      double trial_value = 0.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        trial = c + t * dir;
        trial_eval = obj.evaluate(trial);
        trial_value = obj.augmented(trial_eval, lambda, mu, &trial_grad);
        if (trial_value <= value + 1e-4 * t * slope ||
            (trial_value <= value + noise && trial_grad.norm() < grad.norm())) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;

      Eigen::VectorXd s = trial - c;
      Eigen::VectorXd y = trial_grad - grad;
      if (p.memory > 0 && s.dot(y) > 1e-14 * s.norm() * y.norm()) {
        history.emplace_back(std::move(s), std::move(y));
        if (static_cast<int>(history.size()) > p.memory) history.pop_front();
      }
      step_hint = history.empty() ? std::min(1e6, 2.0 * t * step_hint) : 1.0;
      c = std::move(trial);
      e = std::move(trial_eval);
      value = trial_value;
      grad = std::move(trial_grad);
    }

    const auto res = obj.residuals(e);
    const double violation = *std::max_element(res.begin(), res.end());
    const auto [ls_lambda, tangent] = obj.projected(e);
    if (violation <= p.tolerance && tangent <= p.tolerance * std::max(1.0, e.grad_f.norm())) {
      out.converged = true;
      break;
    }
    if (budget <= 0) break;
    for (int k = 0; k < 3; ++k) lambda(k) -= mu * e.g[k];
    if (violation > 0.25 * previous_violation) mu = std::min(mu * 10.0, 1e10);
    previous_violation = violation;
  }
  out.product = std::sqrt(std::max(0.0, e.f));
  out.residuals = obj.residuals(e);
  out.c = std::move(c);
  return out;
}

inline SuperpositionState state_from_coefficients(const QuadraticForms& forms, const Eigen::VectorXd& c) {
  std::vector<Term> terms;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (c(i) != 0.0) terms.push_back({forms.basis[static_cast<std::size_t>(i)], Amplitude(c(i), 0.0)});
  return SuperpositionState::normalized(std::move(terms));
}

}  // namespace detail

/// Multi-start minimization: one warm start on the optimal integer triple
/// plus p.restarts random unit vectors. Returns the best converged run;
/// throws std::runtime_error when none converges.
inline OptimizeResult minimize_product(const OptimizeProblem& p) {
  const auto in = BoundInputs::make(p.L2_target, p.R_target);
  if (!(p.L2_target > 0.0)) throw std::invalid_argument("L2 target must be positive");
  if (p.n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
  if (p.restarts < 0) throw std::invalid_argument("restarts must be nonnegative");
  if (!(p.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const int l_max = p.l_max > 0 ? p.l_max : default_l_max(p.L2_target, p.R_target);
  if (l_max < required_l_max(p.L2_target, p.R_target))
    throw std::invalid_argument("l_max too small to represent the continuous optimum");
  if (p.L2_target > l_max * (l_max + 1.0)) throw std::invalid_argument("L2 target not representable");

  const auto forms = build_quadratic_forms(p.n_max, l_max);
  const detail::ProductObjective objective(forms, p.L2_target, in.F());
  const auto triple = omega_min_integer(p.L2_target, p.R_target, l_max);

  std::vector<Eigen::VectorXd> starts;
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(forms.dim());
  for (int i = 0; i < 3; ++i) warm(forms.index(0, triple.l[i])) += std::sqrt(triple.probs[i]);
  starts.push_back(warm);
  std::mt19937_64 gen(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int r = 0; r < p.restarts; ++r) {
    Eigen::VectorXd c(forms.dim());
    for (auto& v : c) v = normal(gen);
    starts.push_back(c.normalized());
  }

  OptimizeResult result;
  std::optional<detail::RunOutcome> best;
  std::vector<detail::RunOutcome> runs;
  for (const auto& c0 : starts) runs.push_back(detail::augmented_lagrangian(objective, c0, p));

  auto& stats = result.restarts;
  stats.run = static_cast<int>(runs.size());
  for (const auto& run : runs) {
    stats.products.push_back(run.product);
    stats.converged_flags.push_back(run.converged);
    if (!run.converged) continue;
    ++stats.converged;
    if (!best || run.product < best->product - 1e-10) best = run;
  }
  if (!best) throw std::runtime_error("no restart converged");

  if (runs.front().converged) stats.warm_start_product = runs.front().product;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].converged) continue;
    if (runs[i].product > best->product + 1e-6) ++stats.spurious_minima;
    if (i > 0 && std::isfinite(stats.warm_start_product) &&
        runs[i].product < stats.warm_start_product - 1e-6)
      ++stats.below_warm_start;
  }

  result.best_product = best->product;
  result.best_state = detail::state_from_coefficients(forms, best->c);
  result.constraint_residuals = best->residuals;
  result.converged = true;
  return result;
}

/// Weight of a state on radial ground levels (n = 0).
inline double ground_level_weight(const SuperpositionState& s) {
  double w = 0.0;
  for (const auto& t : s.terms())
    if (t.q.n == 0) w += std::norm(t.amplitude);
  return w;
}

/// Norm of (P^2 r^2 + X^2 p^2 - lambda + 2 eta L^2 + 2 Lambda L^4) psi with
/// X^2 = <r^2>, P^2 = <p^2> and lambda = 2 X^2 P^2 + 2 eta L2 + 2 Lambda F,
/// evaluated exactly in the oscillator basis.
inline double stationarity_residual(const SuperpositionState& s, const Multipliers& m) {
  double x2 = 0.0, p2 = 0.0;
  const auto& t = s.terms();
  for (const auto& a : t)
    for (const auto& b : t) {
      const double o = (std::conj(a.amplitude) * b.amplitude).real();
      x2 += o * r2_element(a.q, b.q);
      p2 += o * p2_element(a.q, b.q);
    }
  const auto ang = angular_stats(s);
  const double lambda = 2.0 * x2 * p2 + 2.0 * m.eta * ang.L2_mean + 2.0 * m.Lambda * ang.F;

  std::map<QuantumNumbers, Amplitude> out;
  for (const auto& b : t) {
    const double a2 = b.q.l_squared();
    out[b.q] += (-lambda + 2.0 * m.eta * a2 + 2.0 * m.Lambda * a2 * a2) * b.amplitude;
    for (int dn = -1; dn <= 1; ++dn) {
      const QuantumNumbers a{b.q.n + dn, b.q.l, b.q.m};
      if (a.n < 0) continue;
      out[a] += (p2 * r2_element(a, b.q) + x2 * p2_element(a, b.q)) * b.amplitude;
    }
  }
  double sum = 0.0;
  for (const auto& [q, v] : out) sum += std::norm(v);
  return std::sqrt(sum);
}

struct StationarityReport {
  double residual = 0.0;
  Multipliers multipliers;
  /// Distinct l values carrying weight above support_threshold.
  int support_levels = 0;
  /// More than three levels: the state is not of the three-level form.
  bool over_supported = false;
  /// Multipliers were not unique (fewer than three levels); a particular
  /// least-norm solution was used.
  bool degenerate_multipliers = false;
};

inline constexpr double support_threshold = 1e-10;

/// Recovers (eta, Lambda, energy) from the levels a state occupies and
/// evaluates the stationarity residual with them.
inline StationarityReport verify_stationarity(const SuperpositionState& s, double omega) {
  std::map<int, double> levels;
  for (const auto& t : s.terms()) levels[t.q.l] += std::norm(t.amplitude);
  std::vector<int> support;
  for (auto it = levels.rbegin(); it != levels.rend(); ++it)
    if (it->second > support_threshold) support.push_back(it->first);

  StationarityReport rep;
  rep.support_levels = static_cast<int>(support.size());
  rep.over_supported = support.size() > 3;

  std::optional<Multipliers> m;
  if (support.size() == 3) {
    const auto ang = angular_stats(s);
    auto sol = solve_probabilities(support[0], support[1], support[2], ang.L2_mean, ang.F);
    if (sol.feasible) m = recover_multipliers(sol, omega);
  }
  if (!m) {
    rep.degenerate_multipliers = support.size() < 3;
    Eigen::MatrixXd M(static_cast<Eigen::Index>(support.size()), 3);
    Eigen::VectorXd rhs(M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      const double l = support[static_cast<std::size_t>(i)];
      const double a = l * (l + 1.0);
      M.row(i) << a, a * a, -1.0;
      rhs(i) = -omega * (heisenberg_value + l);
    }
    const Eigen::Vector3d x = M.completeOrthogonalDecomposition().solve(rhs);
    m = Multipliers{x(0), x(1), x(2)};
  }
  rep.multipliers = *m;
  rep.residual = stationarity_residual(s, *m);
  return rep;
}

inline StationarityReport verify_stationarity(const OptimizeResult& r) {
  if (!r.converged) throw std::invalid_argument("stationarity needs a converged result");
  return verify_stationarity(r.best_state, r.best_product);
}

}  // namespace uncertainty
