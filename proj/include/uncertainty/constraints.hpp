#pragma once

// Three-level variational solution. A state supported on oscillator levels
// with angular numbers l1 >= l2 >= l3 (all n = 0) has probabilities fixed by
//   sum p_i = 1,  sum p_i a_i = L2,  sum p_i a_i^2 = F,  a_i = l_i(l_i+1),
// and the uncertainty product omega = 3/2 + sum p_i (2 n_i + l_i).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "uncertainty/bounds.hpp"

namespace uncertainty {

enum class Domain { Dom1, Dom2, Degenerate, Infeasible };

inline const char* to_string(Domain d) noexcept {
  switch (d) {
    case Domain::Dom1: return "Dom1";
    case Domain::Dom2: return "Dom2";
    case Domain::Degenerate: return "Degenerate";
    case Domain::Infeasible: return "Infeasible";
  }
  return "unknown";
}

/// (eta, Lambda, energy) solving
///   omega (3/2 + 2n_i + l_i) + eta a_i + Lambda a_i^2 = energy,  i = 1..3.
struct Multipliers {
  double eta = 0.0;
  double Lambda = 0.0;
  double energy = 0.0;
};

struct TripleSolution {
  std::array<int, 3> l{0, 0, 0};
  /// Probabilities per slot. Equal levels carry their combined weight in
  /// the first slot of the group; the other slots of the group hold 0.
  std::array<double, 3> probs{0.0, 0.0, 0.0};
  double L2 = 0.0;
  double F = 0.0;
  /// 3/2 + sum p_i l_i (n_i = 0); NaN when infeasible.
  double omega = std::numeric_limits<double>::quiet_NaN();
  bool feasible = false;
  Domain domain = Domain::Infeasible;
  std::optional<Multipliers> multipliers;

  [[nodiscard]] double alpha() const noexcept { return l[0] * (l[0] + 1.0); }
  [[nodiscard]] double beta() const noexcept { return l[1] * (l[1] + 1.0); }
  [[nodiscard]] double gamma() const noexcept { return l[2] * (l[2] + 1.0); }
  [[nodiscard]] bool distinct() const noexcept { return l[0] != l[1] && l[1] != l[2]; }
};

inline constexpr double probability_slack = 1e-12;
inline constexpr double degenerate_tolerance = 1e-9;

namespace detail {

inline double lsq(double l) noexcept { return l * (l + 1.0); }

inline double scaled_tol(double value) noexcept {
  return degenerate_tolerance * std::max(1.0, std::abs(value));
}

inline void check_triple_inputs(int l1, int l2, int l3, double L2, double F) {
  if (!(l1 >= l2 && l2 >= l3 && l3 >= 0))
    throw std::invalid_argument("levels must satisfy l1 >= l2 >= l3 >= 0");
  if (!std::isfinite(L2) || !(L2 > 0.0)) throw std::invalid_argument("L2 must be positive");
  if (!std::isfinite(F) || F < L2 * L2 * (1.0 - 1e-15))
    throw std::invalid_argument("F must be at least L2^2");
}

inline bool in_unit_interval(double p) noexcept {
  return p >= -probability_slack && p <= 1.0 + probability_slack;
}

inline double clamp_unit(double p) noexcept { return std::clamp(p, 0.0, 1.0); }

}  // namespace detail

/// Closed-form probabilities for three distinct values a1, a2, a3 of
/// l(l+1). Valid for real (continuous) levels too; no feasibility check.
inline std::array<double, 3> closed_form_probabilities(const std::array<double, 3>& a,
                                                       double L2, double F) {
  const auto one = [&](double x, double y, double z) {
    return (y * z - L2 * (y + z) + F) / ((x - y) * (x - z));
  };
  return {one(a[0], a[1], a[2]), one(a[1], a[0], a[2]), one(a[2], a[0], a[1])};
}

/// omega(l) = 3/2 + sum p_i l_i for real levels l1 > l2 > l3 >= 0.
inline double omega_continuous(const std::array<double, 3>& l, double L2, double F) {
  const auto p = closed_form_probabilities({detail::lsq(l[0]), detail::lsq(l[1]), detail::lsq(l[2])},
                                           L2, F);
  return heisenberg_value + p[0] * l[0] + p[1] * l[1] + p[2] * l[2];
}

inline Domain feasibility_domain(int l1, int l2, int l3, double L2, double F);

inline TripleSolution solve_probabilities(int l1, int l2, int l3, double L2, double F) {
  detail::check_triple_inputs(l1, l2, l3, L2, F);
  TripleSolution sol;
  sol.l = {l1, l2, l3};
  sol.L2 = L2;
  sol.F = F;
  const double a = sol.alpha(), b = sol.beta(), c = sol.gamma();

  std::array<double, 3> p{0.0, 0.0, 0.0};
  bool ok = false;
  if (l1 != l2 && l2 != l3) {
    p = closed_form_probabilities({a, b, c}, L2, F);
    ok = std::all_of(p.begin(), p.end(), detail::in_unit_interval);
  } else if (l1 == l2 && l2 == l3) {
    p = {1.0, 0.0, 0.0};
    ok = std::abs(L2 - a) <= detail::scaled_tol(a) && std::abs(F - a * a) <= detail::scaled_tol(F);
  } else {
    // Two distinct levels hi > lo; normalization and L2 fix the weights,
    // F must then agree.
    const double hi = a;
    const double lo = c;
    const double p_hi = (L2 - lo) / (hi - lo);
    const double p_lo = 1.0 - p_hi;
    const double F_implied = p_hi * hi * hi + p_lo * lo * lo;
    ok = detail::in_unit_interval(p_hi) && detail::in_unit_interval(p_lo) &&
         std::abs(F_implied - F) <= detail::scaled_tol(F);
    if (l1 == l2)
      p = {p_hi, 0.0, p_lo};
    else
      p = {p_hi, p_lo, 0.0};
  }

  if (ok) {
    for (auto& x : p) x = detail::clamp_unit(x);
    sol.probs = p;
    sol.feasible = true;
    sol.omega = heisenberg_value + p[0] * l1 + p[1] * l2 + p[2] * l3;
  } else {
    sol.probs = p;
  }
  sol.domain = ok ? feasibility_domain(l1, l2, l3, L2, F) : Domain::Infeasible;
  return sol;
}

/// Classifies a triple by the two mutually exclusive inequality chains
///   Dom1: 0 <= g <= L2 <= b <= (F - g L2)/(L2 - g) <= a
///   Dom2: 0 <= g <= b <= L2 <= (F - g L2)/(L2 - g) <= a <= (F - b L2)/(L2 - b)
/// with a > b > g the values l(l+1). Triples with repeated levels (or
/// with L2 = g, where all weight sits on l3) are Degenerate when
/// feasible.
inline Domain feasibility_domain(int l1, int l2, int l3, double L2, double F) {
  detail::check_triple_inputs(l1, l2, l3, L2, F);
  const double a = detail::lsq(l1), b = detail::lsq(l2), g = detail::lsq(l3);

  if (l1 == l2 || l2 == l3) {
    if (l1 == l2 && l2 == l3) {
      const bool ok = std::abs(L2 - a) <= detail::scaled_tol(a) &&
                      std::abs(F - a * a) <= detail::scaled_tol(F);
      return ok ? Domain::Degenerate : Domain::Infeasible;
    }
    const double hi = a, lo = g;
    const double p_hi = (L2 - lo) / (hi - lo);
    const double F_implied = p_hi * hi * hi + (1.0 - p_hi) * lo * lo;
    const bool ok = detail::in_unit_interval(p_hi) && detail::in_unit_interval(1.0 - p_hi) &&
                    std::abs(F_implied - F) <= detail::scaled_tol(F);
    return ok ? Domain::Degenerate : Domain::Infeasible;
  }

  const double tol = detail::scaled_tol(std::max({a, F / std::max(L2, 1e-300), L2}));
  const auto le = [tol](double x, double y) { return x <= y + tol; };

  if (!le(g, L2)) return Domain::Infeasible;
  if (L2 - g <= tol) {
    // Mean equals the lowest level: only the pure l3 eigenstate fits.
    return std::abs(F - L2 * L2) <= detail::scaled_tol(F) ? Domain::Degenerate : Domain::Infeasible;
  }
  const double upper_g = (F - g * L2) / (L2 - g);
  if (le(L2, b)) {
    const bool dom1 = le(b, upper_g) && le(upper_g, a);
    return dom1 ? Domain::Dom1 : Domain::Infeasible;
  }
  const double upper_b = (F - b * L2) / (L2 - b);
  const bool dom2 = le(L2, upper_g) && le(upper_g, a) && le(a, upper_b);
  return dom2 ? Domain::Dom2 : Domain::Infeasible;
}

/// 3/2 + sum p_i (2 n_i + l_i).
inline double omega_of_triple(const TripleSolution& sol, const std::array<int, 3>& n = {0, 0, 0}) {
  if (!sol.feasible) throw std::invalid_argument("omega requires a feasible triple");
  for (int k : n)
    if (k < 0) throw std::invalid_argument("radial numbers must be nonnegative");
  double omega = heisenberg_value;
  for (int i = 0; i < 3; ++i) omega += sol.probs[i] * (2.0 * n[i] + sol.l[i]);
  return omega;
}

/// Solves the three stationarity conditions for (eta, Lambda, energy).
/// Returns nullopt when the levels are not pairwise distinct: the system
/// is then rank deficient and the multipliers are not unique.
inline std::optional<Multipliers> recover_multipliers(const TripleSolution& sol, double omega,
                                                      const std::array<int, 3>& n = {0, 0, 0}) {
  if (!sol.feasible) throw std::invalid_argument("multipliers require a feasible triple");
  if (!sol.distinct()) return std::nullopt;
  Eigen::Matrix3d M;
  Eigen::Vector3d rhs;
  for (int i = 0; i < 3; ++i) {
    const double a = detail::lsq(sol.l[i]);
    M(i, 0) = a;
    M(i, 1) = a * a;
    M(i, 2) = -1.0;
    rhs(i) = -omega * (heisenberg_value + 2.0 * n[i] + sol.l[i]);
  }
  const Eigen::Vector3d x = M.fullPivLu().solve(rhs);
  return Multipliers{x(0), x(1), x(2)};
}

/// Largest residual of the three stationarity equations.
inline double multiplier_residual(const TripleSolution& sol, double omega, const Multipliers& m,
                                  const std::array<int, 3>& n = {0, 0, 0}) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double a = detail::lsq(sol.l[i]);
    const double lhs =
        omega * (heisenberg_value + 2.0 * n[i] + sol.l[i]) + m.eta * a + m.Lambda * a * a;
    worst = std::max(worst, std::abs(lhs - m.energy));
  }
  return worst;
}

/// Smallest variance of l(l+1) compatible with mean L2 over integer l:
/// the two-point law on the neighbouring values a_k <= L2 < a_{k+1}.
inline double min_variance(double L2) {
  if (!std::isfinite(L2) || L2 < 0.0) throw std::invalid_argument("L2 must be nonnegative");
  int k = 0;
  while (detail::lsq(k + 1) <= L2) ++k;
  return (L2 - detail::lsq(k)) * (detail::lsq(k + 1) - L2);
}

/// Smallest admissible search cutoff: ceil(x) + 1 with x the continuous
/// optimum.
inline int required_l_max(double L2, double R) {
  return static_cast<int>(std::ceil(continuous_level(BoundInputs::make(L2, R)))) + 1;
}

/// Exhaustive search over l1 >= l2 >= l3 in [0, l_max] (n = 0). Equal-omega
/// candidates keep the lexicographically smallest (l1, l2, l3).
/// Throws std::domain_error when no triple is feasible (R below
/// min_variance(L2)).
inline TripleSolution omega_min_integer(double L2, double R, int l_max) {
  const auto in = BoundInputs::make(L2, R);
  if (!(L2 > 0.0)) throw std::invalid_argument("omega_min_integer requires L2 > 0");
  const int needed = required_l_max(L2, R);
  if (l_max < needed)
    throw std::invalid_argument("l_max = " + std::to_string(l_max) +
                                " cannot contain the continuous optimum; need >= " +
                                std::to_string(needed));
  const double F = in.F();

  std::optional<TripleSolution> best;
  for (int l1 = 0; l1 <= l_max; ++l1) {
    for (int l2 = 0; l2 <= l1; ++l2) {
      for (int l3 = 0; l3 <= l2; ++l3) {
        auto sol = solve_probabilities(l1, l2, l3, L2, F);
        if (!sol.feasible) continue;
        if (!best || sol.omega < best->omega - 1e-12 * std::max(1.0, best->omega))
          best = std::move(sol);
      }
    }
  }
  if (!best)
    throw std::domain_error("no feasible level triple: R is below the minimum variance " +
                            std::to_string(min_variance(L2)));
  best->multipliers = recover_multipliers(*best, best->omega);
  return *best;
}

/// Default search cutoff: about twice the continuous optimum plus two.
inline int default_l_max(double L2, double R) {
  const double x = continuous_level(BoundInputs::make(L2, R));
  return std::max(required_l_max(L2, R), static_cast<int>(std::ceil(2.0 * x)) + 2);
}

/// Audit of the ceiling/floor expression W against the search.
struct WAudit {
  double x = 0.0;
  double w_as_printed = 0.0;
  double omega_min = 0.0;
  bool w_consistent = false;
  /// omega of the (ceil x, floor x, 0) triple; NaN when that triple is
  /// infeasible.
  double pair_omega = std::numeric_limits<double>::quiet_NaN();
  bool pair_matches_search = false;
};

inline constexpr double w_consistency_tolerance = 1e-10;

inline WAudit audit_w(double L2, double R, const TripleSolution& search) {
  const auto in = BoundInputs::make(L2, R);
  WAudit audit;
  audit.x = continuous_level(in);
  audit.w_as_printed = closed_form_W(in).value;
  audit.omega_min = search.omega;
  audit.w_consistent = std::abs(audit.w_as_printed - search.omega) <= w_consistency_tolerance;
  const int c = static_cast<int>(std::ceil(audit.x));
  const int f = static_cast<int>(std::floor(audit.x));
  const auto pair = solve_probabilities(c, f, 0, L2, in.F());
  if (pair.feasible) {
    audit.pair_omega = pair.omega;
    audit.pair_matches_search = std::abs(pair.omega - search.omega) <= w_consistency_tolerance;
  }
  return audit;
}

/// Finite-difference derivatives of omega_continuous and their signs.
struct DerivativeSigns {
  std::array<double, 3> derivative{0.0, 0.0, 0.0};
  /// +1, -1 or 0 (|derivative| within the slack).
  std::array<int, 3> sign{0, 0, 0};
  /// d1 >= -slack, d2 <= slack, d3 >= -slack.
  bool expected_pattern = false;
};

inline constexpr double derivative_step = 1e-5;
inline constexpr double derivative_slack = 1e-8;

inline DerivativeSigns derivative_signs(double l1, double l2, double l3, double L2, double F) {
  if (!(l1 > l2 && l2 > l3 && l3 >= 0.0))
    throw std::invalid_argument("continuous levels must satisfy l1 > l2 > l3 >= 0");
  if (!(L2 > 0.0) || F < L2 * L2) throw std::invalid_argument("invalid L2 or F");
  const std::array<double, 3> l{l1, l2, l3};
  const auto p =
      closed_form_probabilities({detail::lsq(l1), detail::lsq(l2), detail::lsq(l3)}, L2, F);
  if (!std::all_of(p.begin(), p.end(), detail::in_unit_interval))
    throw std::invalid_argument("infeasible continuous triple");

  const double h = derivative_step;
  DerivativeSigns out;
  for (int i = 0; i < 3; ++i) {
    auto up = l;
    auto down = l;
    up[i] += h;
    if (l[i] - h < 0.0) {
      out.derivative[i] = (omega_continuous(up, L2, F) - omega_continuous(l, L2, F)) / h;
    } else {
      down[i] -= h;
      out.derivative[i] =
          (omega_continuous(up, L2, F) - omega_continuous(down, L2, F)) / (2.0 * h);
    }
    const double d = out.derivative[i];
    out.sign[i] = d > derivative_slack ? 1 : (d < -derivative_slack ? -1 : 0);
  }
  out.expected_pattern = out.derivative[0] >= -derivative_slack &&
                         out.derivative[1] <= derivative_slack &&
                         out.derivative[2] >= -derivative_slack;
  return out;
}

/// Analytic gradient of omega_continuous:
///   d omega / d l_i = (l_i - l_j)(l_i - l_k)(S + l_i) p_i / (Q12 Q13 Q23)
/// with S = 2 + l1 + l2 + l3 and Q_jk = 1 + l_j + l_k.
inline std::array<double, 3> omega_gradient(const std::array<double, 3>& l, double L2, double F) {
  const auto p =
      closed_form_probabilities({detail::lsq(l[0]), detail::lsq(l[1]), detail::lsq(l[2])}, L2, F);
  const double S = 2.0 + l[0] + l[1] + l[2];
  const auto Q = [&](int j, int k) { return 1.0 + l[j] + l[k]; };
  const double denom = Q(0, 1) * Q(0, 2) * Q(1, 2);
  std::array<double, 3> g{};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    g[i] = (l[i] - l[j]) * (l[i] - l[k]) * (S + l[i]) / denom * p[i];
  }
  return g;
}

}  // namespace uncertainty
