#pragma once

// Independent numerical ground truth for the analytic moment algebra.
//
// Radial functions R_nl(r) = N r^l e^{-r^2/2} L_n^(l+1/2)(r^2), normalized
// by int R^2 r^2 dr = 1, are evaluated pointwise together with their first
// two analytic derivatives. Radial integrals int h(r) r^2 dr are mapped to
// x = r^2 and evaluated with the x^{1/2} e^{-x} Gauss-Laguerre rule, which
// is exact for every polynomial-times-Gaussian integrand in play. Angular
// integrals are taken analytically (orthonormal spherical harmonics).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "uncertainty/basis.hpp"
#include "uncertainty/bounds.hpp"
#include "uncertainty/quadrature.hpp"

namespace uncertainty {

struct QuadratureConfig {
  int nodes = 128;
  /// States with more than tail_tolerance probability beyond r_cut are
  /// rejected.
  double r_cut = 20.0;

  void validate() const {
    if (nodes < 64) throw std::invalid_argument("quadrature needs at least 64 nodes");
    if (!(r_cut > 0.0)) throw std::invalid_argument("r_cut must be positive");
  }
};

inline constexpr double quadrature_convergence_tolerance = 1e-8;
inline constexpr double tail_tolerance = 1e-12;
inline constexpr int max_radial_n = 20;
inline constexpr int max_radial_l = 30;

namespace detail {

inline double log_radial_norm(int n, int l) {
  return 0.5 * (std::log(2.0) + std::lgamma(n + 1.0) - std::lgamma(n + l + 1.5));
}

// Plain recurrence; fine for the small degrees used here. Negative degree
// returns 0 so derivative formulas need no special cases.
inline double laguerre(int n, double alpha, double x) {
  if (n < 0) return 0.0;
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

inline void check_radial(const QuantumNumbers& q) {
  if (!q.valid()) throw std::invalid_argument("invalid quantum numbers " + to_string(q));
  if (q.n > max_radial_n || q.l > max_radial_l)
    throw std::invalid_argument("radial functions limited to n <= 20, l <= 30");
}

}  // namespace detail

inline double radial_wavefunction(const QuantumNumbers& q, double r) {
  detail::check_radial(q);
  if (r < 0.0) throw std::invalid_argument("r must be nonnegative");
  const double alpha = q.l + 0.5;
  const double L = detail::laguerre(q.n, alpha, r * r);
  if (r == 0.0) return q.l == 0 ? std::exp(detail::log_radial_norm(q.n, 0)) * L : 0.0;
  return std::exp(detail::log_radial_norm(q.n, q.l) + q.l * std::log(r) - 0.5 * r * r) * L;
}

struct RadialSample {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// R, R', R'' at r > 0, from R = N u g with u = r^l e^{-r^2/2} and
/// g = L_n^(a)(r^2), using dL_n^(a)/dx = -L_{n-1}^(a+1).
inline RadialSample radial_derivatives(const QuantumNumbers& q, double r) {
  detail::check_radial(q);
  if (!(r > 0.0)) throw std::invalid_argument("radial derivatives need r > 0");
  const double a = q.l + 0.5;
  const double x = r * r;
  const double l = q.l;
  const double Nu = std::exp(detail::log_radial_norm(q.n, q.l) + l * std::log(r) - 0.5 * x);

  const double g = detail::laguerre(q.n, a, x);
  const double dL = -detail::laguerre(q.n - 1, a + 1.0, x);
  const double d2L = detail::laguerre(q.n - 2, a + 2.0, x);
  const double g1 = 2.0 * r * dL;
  const double g2 = 2.0 * dL + 4.0 * x * d2L;

  const double u1 = l / r - r;                    // u'/u
  const double u2 = u1 * u1 - l / x - 1.0;        // u''/u
  return {Nu * g, Nu * (u1 * g + g1), Nu * (u2 * g + 2.0 * u1 * g1 + g2)};
}

/// Radial integrals between two radial functions with the same l.
struct RadialElements {
  double overlap = 0.0;  // int R_a R_b r^2 dr
  double r2 = 0.0;       // int R_a r^2 R_b r^2 dr
  double p2 = 0.0;       // int R_a (T R_b) r^2 dr, T = -(1/r^2) d/dr r^2 d/dr + l(l+1)/r^2
};

inline RadialElements radial_elements(const QuantumNumbers& a, const QuantumNumbers& b,
                                      const GaussLaguerreRule& rule) {
  if (a.l != b.l) throw std::invalid_argument("radial elements need equal l");
  const double centrifugal = a.l_squared();
  RadialElements e;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double x = rule.nodes[k];
    const double r = std::sqrt(x);
    const double w = 0.5 * rule.scaled_weights[k];
    const double Ra = radial_wavefunction(a, r);
    const auto Rb = radial_derivatives(b, r);
    const double kinetic = -Rb.d2 - 2.0 * Rb.d1 / r + centrifugal * Rb.value / x;
    e.overlap += w * Ra * Rb.value;
    e.r2 += w * Ra * Rb.value * x;
    e.p2 += w * Ra * kinetic;
  }
  return e;
}

/// Probability of the radial density beyond r_cut.
inline double radial_tail(const QuantumNumbers& q, double r_cut, const GaussLaguerreRule& rule) {
  double tail = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double r = std::sqrt(rule.nodes[k]);
    if (r <= r_cut) continue;
    const double R = radial_wavefunction(q, r);
    tail += 0.5 * rule.scaled_weights[k] * R * R;
  }
  return tail;
}

namespace detail {

inline MomentReport quadrature_moments_with(const SuperpositionState& s, const GaussLaguerreRule& rule) {
  const auto& t = s.terms();
  double r2 = 0.0;
  double p2 = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (t[i].q.l != t[j].q.l || t[i].q.m != t[j].q.m) continue;
      const auto e = radial_elements(t[i].q, t[j].q, rule);
      const double overlap = (std::conj(t[i].amplitude) * t[j].amplitude).real();
      r2 += overlap * e.r2;
      p2 += overlap * e.p2;
    }
  }
  return make_moment_report(r2, p2);
}

}  // namespace detail

/// <r^2>, <p^2> by quadrature; compares against a rule with twice the
/// nodes and throws std::runtime_error when they differ by more than 1e-8.
inline MomentReport quadrature_moments(const SuperpositionState& s, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  if (!s.zero_mean_guaranteed())
    throw std::invalid_argument("state couples l and l+1; <r>, <p> are not guaranteed to vanish");
  for (const auto& t : s.terms()) detail::check_radial(t.q);

  const auto& rule = half_integer_laguerre_rule(cfg.nodes);
  for (const auto& t : s.terms())
    if (radial_tail(t.q, cfg.r_cut, rule) > tail_tolerance)
      throw std::runtime_error("radial density of " + to_string(t.q) + " extends beyond r_cut");

  const auto coarse = detail::quadrature_moments_with(s, rule);
  const auto fine = detail::quadrature_moments_with(s, half_integer_laguerre_rule(2 * cfg.nodes));
  if (std::abs(coarse.r2 - fine.r2) > quadrature_convergence_tolerance ||
      std::abs(coarse.p2 - fine.p2) > quadrature_convergence_tolerance)
    throw std::runtime_error("quadrature did not converge under node doubling");
  return coarse;
}

enum class Parity { Even, Odd };

inline const char* to_string(Parity p) noexcept { return p == Parity::Even ? "even" : "odd"; }

/// All (n, l, m) with n <= n_max, l <= l_max and l of the given parity.
inline std::vector<QuantumNumbers> parity_basis(int n_max, int l_max, Parity parity) {
  if (n_max < 0 || l_max < 0) throw std::invalid_argument("n_max and l_max must be nonnegative");
  std::vector<QuantumNumbers> basis;
  for (int l = parity == Parity::Even ? 0 : 1; l <= l_max; l += 2)
    for (int n = 0; n <= n_max; ++n)
      for (int m = -l; m <= l; ++m) basis.push_back({n, l, m});
  return basis;
}

/// Uniformly chosen distinct basis states of one parity with complex
/// standard-normal amplitudes, normalized. Deterministic per seed.
inline SuperpositionState random_state(int n_max, int l_max, Parity parity, int terms, std::uint64_t seed) {
  if (terms < 1) throw std::invalid_argument("terms must be positive");
  auto basis = parity_basis(n_max, l_max, parity);
  if (static_cast<std::size_t>(terms) > basis.size())
    throw std::invalid_argument("terms exceeds the available basis size");
  std::mt19937_64 gen(seed);
  std::shuffle(basis.begin(), basis.end(), gen);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Term> chosen;
  chosen.reserve(static_cast<std::size_t>(terms));
  for (int i = 0; i < terms; ++i) {
    const double re = normal(gen);
    const double im = normal(gen);
    chosen.push_back({basis[static_cast<std::size_t>(i)], Amplitude(re, im)});
  }
  return SuperpositionState::normalized(std::move(chosen));
}

struct ScanReport {
  std::int64_t samples = 0;
  std::int64_t violations = 0;
  /// min over samples of product - Omega; +inf when samples = 0.
  double worst_margin = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  /// Index of the sample attaining worst_margin; -1 when empty.
  std::int64_t worst_index = -1;
};

inline constexpr double violation_tolerance = 1e-8;

struct ScanSample {
  SuperpositionState state;
  MomentReport moments;
  AngularStats angular;
  double omega = heisenberg_value;
  double margin = 0.0;
};

/// Sample i of a scan: generator seeded with seed + i picks a parity, a
/// term count in [1, max_terms] and the state seed.
inline ScanSample scan_sample(std::int64_t index, int n_max, int l_max, int max_terms, std::uint64_t seed) {
  std::mt19937_64 gen(seed + static_cast<std::uint64_t>(index));
  const Parity parity = std::bernoulli_distribution(0.5)(gen) ? Parity::Odd : Parity::Even;
  const auto available = static_cast<int>(parity_basis(n_max, l_max, parity).size());
  if (available == 0) throw std::invalid_argument("no basis states of the requested parity");
  const int terms = std::min(std::uniform_int_distribution<int>(1, max_terms)(gen), available);
  ScanSample s;
  s.state = random_state(n_max, l_max, parity, terms, gen());
  s.moments = moments_superposition(s.state);
  s.angular = angular_stats(s.state);
  s.omega = omega_bound(BoundInputs::make(s.angular.L2_mean, s.angular.R)).value;
  s.margin = s.moments.product - s.omega;
  return s;
}

/// Randomized falsification attempt: product - Omega over random
/// parity-pure states. Samples are split across threads; the result does
/// not depend on the thread count.
inline ScanReport scan(std::int64_t samples, int n_max, int l_max, int max_terms, std::uint64_t seed,
                       unsigned threads = 0) {
  if (samples < 0) throw std::invalid_argument("samples must be nonnegative");
  if (max_terms < 1) throw std::invalid_argument("terms must be positive");
  if (n_max < 0 || l_max < 0) throw std::invalid_argument("n_max and l_max must be nonnegative");

  ScanReport total;
  total.seed = seed;
  total.samples = samples;
  if (samples == 0) return total;

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, (samples + 255) / 256));
  threads = std::max(threads, 1u);

  std::vector<ScanReport> partial(threads);
  std::vector<std::exception_ptr> errors(threads);
  const auto work = [&](unsigned t) {
    try {
      auto& rep = partial[t];
      const std::int64_t begin = samples * t / threads;
      const std::int64_t end = samples * (t + 1) / threads;
      for (std::int64_t i = begin; i < end; ++i) {
        const auto s = scan_sample(i, n_max, l_max, max_terms, seed);
        if (s.margin < -violation_tolerance) ++rep.violations;
        if (s.margin < rep.worst_margin) {
          rep.worst_margin = s.margin;
          rep.worst_index = i;
        }
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
    work(0);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Chunks are ordered, so strict < keeps the smallest index on ties.
  for (const auto& rep : partial) {
    total.violations += rep.violations;
    if (rep.worst_margin < total.worst_margin) {
      total.worst_margin = rep.worst_margin;
      total.worst_index = rep.worst_index;
    }
  }
  return total;
}

}  // namespace uncertainty
