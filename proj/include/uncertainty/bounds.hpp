#pragma once

/// Closed-form lower bounds on the position-momentum uncertainty product
/// sigma_r * sigma_p (units of hbar) for a three-dimensional state whose
/// squared angular momentum has mean L2 and variance R.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uncertainty {

inline constexpr double heisenberg_value = 1.5;

/// Mean (L2, units hbar^2) and variance (R, units hbar^4) of L^2.
struct BoundInputs {
  double L2 = 0.0;
  double R = 0.0;

  /// Mean of L^4.
  [[nodiscard]] double F() const noexcept { return R + L2 * L2; }

  static BoundInputs make(double L2, double R) {
    if (!std::isfinite(L2) || !std::isfinite(R))
      throw std::invalid_argument("bound inputs must be finite");
    if (L2 < 0.0) throw std::invalid_argument("L2 must be nonnegative");
    if (R < 0.0) throw std::invalid_argument("R must be nonnegative");
    return BoundInputs{L2, R};
  }
};

enum class BoundKind { Heisenberg, Eigenstate, Omega, W };

inline const char* to_string(BoundKind k) noexcept {
  switch (k) {
    case BoundKind::Heisenberg: return "heisenberg";
    case BoundKind::Eigenstate: return "eigenstate";
    case BoundKind::Omega: return "omega";
    case BoundKind::W: return "w_as_printed";
  }
  return "unknown";
}

struct BoundValue {
  double value = heisenberg_value;
  BoundKind kind = BoundKind::Heisenberg;
};

inline BoundValue heisenberg_bound() noexcept {
  return {heisenberg_value, BoundKind::Heisenberg};
}

/// Bound for an exact L^2 eigenstate with quantum number l.
inline BoundValue pj_bound(int l) {
  if (l < 0) throw std::invalid_argument("l must be nonnegative");
  return {static_cast<double>(l) + heisenberg_value, BoundKind::Eigenstate};
}

namespace detail {

inline void check_inputs(const BoundInputs& in) {
  (void)BoundInputs::make(in.L2, in.R);
}

// Snaps values within a few ulps of an integer so ceil/floor are stable
// for inputs such as L2 = l(l+1), R = 0 where x is an integer in exact
// arithmetic.
inline double snap_integer(double x) noexcept {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-12 * std::max(1.0, std::abs(x))) return nearest;
  return x;
}

}  // namespace detail

/// Main sharpened bound, evaluated in the cancellation-free form
/// 3/2 + 2 L^3 / (s + L) with s = sqrt(4F + L^2) and L = sqrt(L2).
/// L2 = 0 returns the limit 3/2.
inline BoundValue omega_bound(const BoundInputs& in) {
  detail::check_inputs(in);
  if (in.L2 == 0.0) return {heisenberg_value, BoundKind::Omega};
  const double L = std::sqrt(in.L2);
  const double s = std::sqrt(4.0 * in.F() + in.L2);
  return {heisenberg_value + 2.0 * in.L2 * L / (s + L), BoundKind::Omega};
}

/// Same bound in the direct form 3/2 + (L^4 / 2F)(sqrt(1 + 4F/L^2) - 1).
/// Loses digits for F >> L^2; kept as an independent route for tests.
inline BoundValue omega_bound_printed(const BoundInputs& in) {
  detail::check_inputs(in);
  if (in.L2 == 0.0) return {heisenberg_value, BoundKind::Omega};
  const double F = in.F();
  const double value =
      heisenberg_value + in.L2 * in.L2 / (2.0 * F) * (std::sqrt(1.0 + 4.0 * F / in.L2) - 1.0);
  return {value, BoundKind::Omega};
}

/// Continuous optimum of the three-level problem: l1 = l2 = x, l3 = 0.
struct ContinuousOptimum {
  double l12 = 0.0;
  double l3 = 0.0;
};

/// x = sqrt(4F + L^2) / (2L) - 1/2, computed as (sqrt(1 + 4F/L2) - 1) / 2
/// so that x is exact when F/L2 = l(l+1).
inline double continuous_level(const BoundInputs& in) {
  detail::check_inputs(in);
  if (in.L2 == 0.0)
    throw std::invalid_argument("continuous optimum undefined for L2 = 0");
  return detail::snap_integer(0.5 * (std::sqrt(1.0 + 4.0 * in.F() / in.L2) - 1.0));
}

inline ContinuousOptimum optimal_l_continuous(const BoundInputs& in) {
  return {continuous_level(in), 0.0};
}

/// Ceiling/floor refinement W(x) evaluated verbatim. It disagrees with the
/// exhaustive integer search (see constraints.hpp) and must never be used
/// to enforce anything; it is reported only next to a consistency flag.
inline BoundValue closed_form_W(const BoundInputs& in) {
  const double x = continuous_level(in);
  const double c = std::ceil(x);
  const double f = std::floor(x);
  const double numerator =
      in.L2 * ((1.0 + c) * (1.0 + c) + (1.0 + f) * (1.0 + f) + c * f - 1.0) - in.F();
  return {numerator / ((1.0 + c) * (1.0 + f)), BoundKind::W};
}

/// One sample of the bound-versus-L curve.
struct CurveRow {
  double L = 0.0;
  double omega = heisenberg_value;
  /// l + 3/2 written as a function of L = sqrt(l(l+1)).
  double pj_reference = heisenberg_value;
};

inline double pj_reference(double L) noexcept {
  return 1.0 + 0.5 * std::sqrt(1.0 + 4.0 * L * L);
}

inline std::vector<CurveRow> curve(double R, double L_min, double L_max, int steps) {
  if (!(std::isfinite(L_min) && std::isfinite(L_max)) || L_min < 0.0 || !(L_min < L_max))
    throw std::invalid_argument("curve requires 0 <= L_min < L_max");
  if (steps < 2) throw std::invalid_argument("curve requires at least 2 steps");
  if (!std::isfinite(R) || R < 0.0) throw std::invalid_argument("R must be nonnegative");

  std::vector<CurveRow> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  const double h = (L_max - L_min) / static_cast<double>(steps - 1);
  for (int i = 0; i < steps; ++i) {
    const double L = (i == steps - 1) ? L_max : L_min + h * static_cast<double>(i);
    rows.push_back({L, omega_bound(BoundInputs::make(L * L, R)).value, pj_reference(L)});
  }
  return rows;
}

/// Decimal notation with 15 significant digits; never uses an exponent.
inline std::string format_decimal(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("cannot format non-finite value");
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  std::string s(buf);
  if (s.find_first_of("eE") == std::string::npos) return s;

  const int exponent = static_cast<int>(std::floor(std::log10(std::abs(v))));
  const int decimals = std::max(0, 14 - exponent);
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

inline void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows) {
  os << "L,omega,pj_reference\n";
  for (const auto& r : rows)
    os << format_decimal(r.L) << ',' << format_decimal(r.omega) << ','
       << format_decimal(r.pj_reference) << '\n';
}

}  // namespace uncertainty
