#pragma once

// Exact moment algebra over isotropic harmonic-oscillator eigenstates
// |n l m> in oscillator units (hbar = omega = mass = 1). Energies are
// 2n + l + 3/2, and <r^2> = <p^2> = energy on every eigenstate.
//
// Radial functions use the Laguerre convention L_n^(l+1/2)(0) > 0, i.e.
// every radial function is positive near the origin. With that choice
//   <n l| r^2 |n+1 l> = -sqrt((n+1)(n+l+3/2)),
//   <n l| p^2 |n+1 l> = +sqrt((n+1)(n+l+3/2)),
// which the quadrature oracle (oracle.hpp) reproduces independently.

#include <algorithm>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uncertainty {

using Amplitude = std::complex<double>;

struct QuantumNumbers {
  int n = 0;
  int l = 0;
  int m = 0;

  [[nodiscard]] bool valid() const noexcept { return n >= 0 && l >= 0 && std::abs(m) <= l; }
  [[nodiscard]] double energy() const noexcept { return 2.0 * n + l + 1.5; }
  [[nodiscard]] double l_squared() const noexcept { return static_cast<double>(l) * (l + 1); }

  friend auto operator<=>(const QuantumNumbers&, const QuantumNumbers&) = default;
};

inline std::string to_string(const QuantumNumbers& q) {
  return "(" + std::to_string(q.n) + "," + std::to_string(q.l) + "," + std::to_string(q.m) + ")";
}

struct Term {
  QuantumNumbers q;
  Amplitude amplitude;
};

inline constexpr double normalization_tolerance = 1e-12;

/// Normalized finite superposition of distinct oscillator eigenstates.
/// Immutable after construction.
class SuperpositionState {
 public:
  SuperpositionState() = default;

  /// Validates distinctness and normalization (within 1e-12).
  explicit SuperpositionState(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("state needs at least one term");
    for (const auto& t : terms_)
      if (!t.q.valid()) throw std::invalid_argument("invalid quantum numbers " + to_string(t.q));
    auto sorted = terms_;
    std::sort(sorted.begin(), sorted.end(),
              [](const Term& a, const Term& b) { return a.q < b.q; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i].q == sorted[i - 1].q)
        throw std::invalid_argument("repeated quantum numbers " + to_string(sorted[i].q));
    if (std::abs(norm() - 1.0) > normalization_tolerance)
      throw std::invalid_argument("state is not normalized");
  }

  /// Rescales the amplitudes to unit norm before validating.
  static SuperpositionState normalized(std::vector<Term> terms) {
    double n2 = 0.0;
    for (const auto& t : terms) n2 += std::norm(t.amplitude);
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw std::invalid_argument("state has zero norm");
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& t : terms) t.amplitude *= scale;
    return SuperpositionState(std::move(terms));
  }

  [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }
  [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }

  [[nodiscard]] double norm() const noexcept {
    double n2 = 0.0;
    for (const auto& t : terms_) n2 += std::norm(t.amplitude);
    return n2;
  }

  /// All l share one parity.
  [[nodiscard]] bool parity_pure() const noexcept {
    if (terms_.empty()) return true;
    const int parity = terms_.front().q.l % 2;
    return std::all_of(terms_.begin(), terms_.end(),
                       [parity](const Term& t) { return t.q.l % 2 == parity; });
  }

  /// No pair of terms is connected by the dipole rule |l_i - l_j| = 1, so
  /// <r> = <p> = 0 exactly. Holds for every parity-pure state and for the
  /// ground-state + (0, l0, 0) family with l0 > 1.
  [[nodiscard]] bool zero_mean_guaranteed() const noexcept {
    for (std::size_t i = 0; i < terms_.size(); ++i)
      for (std::size_t j = i + 1; j < terms_.size(); ++j)
        if (std::abs(terms_[i].q.l - terms_[j].q.l) == 1) return false;
    return true;
  }

 private:
  std::vector<Term> terms_;
};

struct AngularStats {
  double L2_mean = 0.0;
  double L4_mean = 0.0;
  double R = 0.0;
  double F = 0.0;
};

struct MomentReport {
  double r2 = 0.0;
  double p2 = 0.0;
  double sigma_r = 0.0;
  double sigma_p = 0.0;
  double product = 0.0;
};

inline MomentReport make_moment_report(double r2, double p2) {
  const double sr = std::sqrt(r2);
  const double sp = std::sqrt(p2);
  return {r2, p2, sr, sp, sr * sp};
}

/// <a| r^2 |b> for oscillator eigenstates.
inline double r2_element(const QuantumNumbers& a, const QuantumNumbers& b) noexcept {
  if (a.l != b.l || a.m != b.m) return 0.0;
  if (a.n == b.n) return a.energy();
  if (std::abs(a.n - b.n) != 1) return 0.0;
  const int n = std::min(a.n, b.n);
  return -std::sqrt((n + 1.0) * (n + a.l + 1.5));
}

/// <a| p^2 |b>; equals 2 E delta_ab - <a| r^2 |b>.
inline double p2_element(const QuantumNumbers& a, const QuantumNumbers& b) noexcept {
  if (a == b) return a.energy();
  return -r2_element(a, b);
}

inline MomentReport moments_single(const QuantumNumbers& q) {
  if (!q.valid()) throw std::invalid_argument("invalid quantum numbers " + to_string(q));
  return make_moment_report(q.energy(), q.energy());
}

/// Second moments of a superposition whose means vanish exactly.
inline MomentReport moments_superposition(const SuperpositionState& s) {
  if (!s.zero_mean_guaranteed())
    throw std::invalid_argument(
        "state couples l and l+1; <r>, <p> are not guaranteed to vanish");
  const auto& t = s.terms();
  double r2 = 0.0;
  double p2 = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double overlap = (std::conj(t[i].amplitude) * t[j].amplitude).real();
      r2 += overlap * r2_element(t[i].q, t[j].q);
      p2 += overlap * p2_element(t[i].q, t[j].q);
    }
  }
  return make_moment_report(r2, p2);
}

inline AngularStats angular_stats(const SuperpositionState& s) {
  double L2 = 0.0;
  double L4 = 0.0;
  for (const auto& t : s.terms()) {
    const double w = std::norm(t.amplitude);
    const double a = t.q.l_squared();
    L2 += w * a;
    L4 += w * a * a;
  }
  // Centered sum keeps R >= 0 and exact for eigenstates.
  double R = 0.0;
  for (const auto& t : s.terms()) {
    const double d = t.q.l_squared() - L2;
    R += std::norm(t.amplitude) * d * d;
  }
  return {L2, L4, R, R + L2 * L2};
}

/// Ground state plus (0, l0, 0) with <L^2> = L2:
///   sqrt(1 - L2/(l0(l0+1))) |0 0 0> + sqrt(L2/(l0(l0+1))) |0 l0 0>.
/// Requires l0 > 1 and 0 < L2 < l0(l0+1).
inline SuperpositionState example_state(int l0, double L2) {
  if (l0 <= 1) throw std::invalid_argument("example state requires l0 > 1");
  const double top = static_cast<double>(l0) * (l0 + 1);
  if (!std::isfinite(L2) || !(L2 > 0.0) || !(L2 < top))
    throw std::invalid_argument("example state requires 0 < L2 < l0(l0+1)");
  const double w = L2 / top;
  return SuperpositionState({{{0, 0, 0}, Amplitude(std::sqrt(1.0 - w), 0.0)},
                             {{0, l0, 0}, Amplitude(std::sqrt(w), 0.0)}});
}

}  // namespace uncertainty
