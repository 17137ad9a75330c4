#pragma once

// Command-line front end. Every subcommand writes one machine-readable
// report (CSV for `curve`, JSON otherwise) to stdout or --output.
//
// Exit codes: 0 success, 1 internal failure, 2 invalid input,
// 3 check failure (--check on scan / minimize).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uncertainty/uncertainty.hpp"

namespace uncertainty::cli {

enum ExitCode : int { ok = 0, internal_failure = 1, invalid_input = 2, check_failed = 3 };

inline constexpr std::uint64_t default_seed = 20100601;

/// Tolerances used by --check.
inline constexpr double bound_check_slack = 1e-6;
inline constexpr double omega_min_match_tolerance = 1e-4;

namespace detail {

struct Emitted {
  std::string body;
  int code = ok;
};

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json bound_report(double L2, double R) {
  const auto in = BoundInputs::make(L2, R);
  json j{{"L2", L2},
         {"R", R},
         {"F", in.F()},
         {"heisenberg", heisenberg_bound().value},
         {"omega", omega_bound(in).value},
         {"omega_direct_form", omega_bound_printed(in).value}};
  if (L2 == 0.0) {
    j["x"] = nullptr;
    j["w_as_printed"] = nullptr;
    j["omega_min"] = nullptr;
    j["w_consistent"] = nullptr;
    return j;
  }
  j["x"] = continuous_level(in);
  j["w_as_printed"] = closed_form_W(in).value;
  try {
    const auto search = omega_min_integer(L2, R, default_l_max(L2, R));
    const auto audit = audit_w(L2, R, search);
    j["omega_min"] = search.omega;
    j["omega_min_triple"] = search.l;
    j["w_consistent"] = audit.w_consistent;
    j["pair_omega"] = uncertainty::detail::number_or_null(audit.pair_omega);
    j["pair_matches_search"] = audit.pair_matches_search;
    j["feasible"] = true;
  } catch (const std::domain_error&) {
    j["omega_min"] = nullptr;
    j["w_consistent"] = false;
    j["feasible"] = false;
    j["min_variance"] = min_variance(L2);
  }
  return j;
}

}  // namespace detail

/// Parses argv and runs one subcommand; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Angular-momentum-sharpened uncertainty bounds: evaluation, search and numerical checks",
               "uncertainty"};
  app.require_subcommand(1);
  std::string output;
  app.add_option("-o,--output", output, "Write the report to this path instead of stdout");

  std::function<detail::Emitted()> action;

  // bound
  double b_l2 = 0.0, b_r = 0.0;
  auto* bound = app.add_subcommand("bound", "Evaluate the Heisenberg, Omega and W expressions");
  bound->add_option("--l2", b_l2, "Mean of L^2")->required()->check(CLI::NonNegativeNumber);
  bound->add_option("--r", b_r, "Variance of L^2")->required()->check(CLI::NonNegativeNumber);
  bound->add_option("-o,--output", output, "Output path");
  bound->callback([&] {
    action = [&] { return detail::Emitted{detail::dump(detail::bound_report(b_l2, b_r))}; };
  });

  // curve
  double c_r = 1000.0, c_lmin = 0.0, c_lmax = 10.0;
  int c_steps = 100;
  auto* curve_cmd = app.add_subcommand("curve", "Omega versus L at fixed R as CSV");
  curve_cmd->add_option("--r", c_r, "Variance of L^2")->required()->check(CLI::NonNegativeNumber);
  curve_cmd->add_option("--lmin", c_lmin, "Smallest L")->check(CLI::NonNegativeNumber);
  curve_cmd->add_option("--lmax", c_lmax, "Largest L")->required();
  curve_cmd->add_option("--steps", c_steps, "Number of grid points (>= 2)")->required();
  curve_cmd->add_option("-o,--output", output, "Output path");
  curve_cmd->callback([&] {
    action = [&] {
      std::ostringstream os;
      write_curve_csv(os, curve(c_r, c_lmin, c_lmax, c_steps));
      return detail::Emitted{os.str()};
    };
  });

  // example
  int e_l0 = 3;
  double e_l2 = 2.0;
  int e_nodes = 128;
  auto* example = app.add_subcommand("example", "Two-level ground + (0,l0,0) state that saturates Omega");
  example->add_option("--l0", e_l0, "Angular number of the excited component (> 1)")->required();
  example->add_option("--l2", e_l2, "Mean of L^2, 0 < L2 < l0(l0+1)")->required();
  example->add_option("--nodes", e_nodes, "Quadrature nodes for the cross-check");
  example->add_option("-o,--output", output, "Output path");
  example->callback([&] {
    action = [&] {
      const auto s = example_state(e_l0, e_l2);
      const auto m = moments_superposition(s);
      const auto a = angular_stats(s);
      const double omega = omega_bound(BoundInputs::make(a.L2_mean, a.R)).value;
      const auto quad = quadrature_moments(s, QuadratureConfig{e_nodes, 20.0});
      json j{{"l0", e_l0},
             {"L2", a.L2_mean},
             {"R", a.R},
             {"product", m.product},
             {"closed_form_product", heisenberg_value + e_l2 / (e_l0 + 1.0)},
             {"quadrature_product", quad.product},
             {"omega", omega},
             {"saturated", std::abs(m.product - omega) <= 1e-10},
             {"moments", m},
             {"state", s}};
      return detail::Emitted{detail::dump(j)};
    };
  });

  // solve
  std::vector<int> s_triple;
  double s_l2 = 0.0;
  std::optional<double> s_f, s_r;
  auto* solve = app.add_subcommand("solve", "Probabilities, domain and multipliers for one level triple");
  solve->add_option("--triple", s_triple, "Levels l1 l2 l3 (l1 >= l2 >= l3)")->required()->expected(3);
  solve->add_option("--l2", s_l2, "Mean of L^2")->required();
  auto* f_opt = solve->add_option("--f", s_f, "Mean of L^4");
  auto* r_opt = solve->add_option("--r", s_r, "Variance of L^2");
  f_opt->excludes(r_opt);
  solve->add_option("-o,--output", output, "Output path");
  solve->callback([&] {
    action = [&] {
      if (!s_f && !s_r) throw std::invalid_argument("solve needs --f or --r");
      const double F = s_f ? *s_f : *s_r + s_l2 * s_l2;
      auto sol = solve_probabilities(s_triple[0], s_triple[1], s_triple[2], s_l2, F);
      json j = sol;
      if (sol.feasible) {
        sol.multipliers = recover_multipliers(sol, sol.omega);
        j = sol;
        j["multipliers_unique"] = sol.multipliers.has_value();
        if (sol.multipliers) j["multiplier_residual"] = multiplier_residual(sol, sol.omega, *sol.multipliers);
      }
      return detail::Emitted{detail::dump(j)};
    };
  });

  // omega-min
  double m_l2 = 0.0, m_r = 0.0;
  int m_lmax = 0;
  auto* omin = app.add_subcommand("omega-min", "Exhaustive integer search for the optimal level triple");
  omin->add_option("--l2", m_l2, "Mean of L^2")->required();
  omin->add_option("--r", m_r, "Variance of L^2")->required();
  omin->add_option("--lmax", m_lmax, "Search cutoff (default: about twice the continuous optimum)");
  omin->add_option("-o,--output", output, "Output path");
  omin->callback([&] {
    action = [&] {
      const int l_max = m_lmax > 0 ? m_lmax : default_l_max(m_l2, m_r);
      const auto sol = omega_min_integer(m_l2, m_r, l_max);
      const auto audit = audit_w(m_l2, m_r, sol);
      const auto in = BoundInputs::make(m_l2, m_r);
      json j{{"solution", sol},
             {"l_max", l_max},
             {"omega_bound", omega_bound(in).value},
             {"saturated", std::abs(sol.omega - omega_bound(in).value) <= 1e-10},
             {"x", audit.x},
             {"w_as_printed", audit.w_as_printed},
             {"w_consistent", audit.w_consistent},
             {"pair_omega", uncertainty::detail::number_or_null(audit.pair_omega)},
             {"pair_matches_search", audit.pair_matches_search}};
      return detail::Emitted{detail::dump(j)};
    };
  });

  // verify-basis
  int v_states = 100, v_nmax = 4, v_lmax = 8, v_terms = 5, v_nodes = 128;
  std::uint64_t v_seed = default_seed;
  auto* verify = app.add_subcommand("verify-basis", "Quadrature cross-check of the analytic moment algebra");
  verify->add_option("--states", v_states, "Random states to compare");
  verify->add_option("--n-max", v_nmax, "Largest radial number");
  verify->add_option("--l-max", v_lmax, "Largest angular number");
  verify->add_option("--terms", v_terms, "Largest number of terms per state");
  verify->add_option("--nodes", v_nodes, "Quadrature nodes");
  verify->add_option("--seed", v_seed, "Master seed");
  verify->add_option("-o,--output", output, "Output path");
  verify->callback([&] {
    action = [&] {
      if (v_states < 0) throw std::invalid_argument("states must be nonnegative");
      const QuadratureConfig cfg{v_nodes, 20.0};
      cfg.validate();
      const auto& rule = half_integer_laguerre_rule(v_nodes);
      double norm_err = 0.0, orth_err = 0.0, herm_err = 0.0;
      for (int l = 0; l <= v_lmax; ++l)
        for (int n = 0; n <= v_nmax; ++n)
          for (int k = n; k <= v_nmax; ++k) {
            const auto ab = radial_elements({n, l, 0}, {k, l, 0}, rule);
            const auto ba = radial_elements({k, l, 0}, {n, l, 0}, rule);
            if (n == k)
              norm_err = std::max(norm_err, std::abs(ab.overlap - 1.0));
            else
              orth_err = std::max(orth_err, std::abs(ab.overlap));
            herm_err = std::max({herm_err, std::abs(ab.r2 - ba.r2), std::abs(ab.p2 - ba.p2)});
          }
      double dr2 = 0.0, dp2 = 0.0;
      for (int i = 0; i < v_states; ++i) {
        const auto s = scan_sample(i, v_nmax, v_lmax, v_terms, v_seed).state;
        const auto a = moments_superposition(s);
        const auto q = quadrature_moments(s, cfg);
        dr2 = std::max(dr2, std::abs(a.r2 - q.r2));
        dp2 = std::max(dp2, std::abs(a.p2 - q.p2));
      }
      json j{{"states", v_states},
             {"seed", v_seed},
             {"nodes", v_nodes},
             {"max_abs_diff_r2", dr2},
             {"max_abs_diff_p2", dp2},
             {"max_normalization_error", norm_err},
             {"max_orthogonality_error", orth_err},
             {"max_hermiticity_error", herm_err},
             {"passed", dr2 < 1e-8 && dp2 < 1e-8 && norm_err < 1e-12 && orth_err < 1e-12 && herm_err < 1e-10}};
      return detail::Emitted{detail::dump(j)};
    };
  });

  // scan
  std::int64_t sc_samples = 10000;
  int sc_nmax = 4, sc_lmax = 8, sc_terms = 5;
  unsigned sc_threads = 0;
  std::uint64_t sc_seed = default_seed;
  bool sc_check = false;
  auto* scan_cmd = app.add_subcommand("scan", "Search random parity-pure states for violations of Omega");
  scan_cmd->add_option("--samples", sc_samples, "Number of random states");
  scan_cmd->add_option("--n-max", sc_nmax, "Largest radial number");
  scan_cmd->add_option("--l-max", sc_lmax, "Largest angular number");
  scan_cmd->add_option("--terms", sc_terms, "Largest number of terms per state");
  scan_cmd->add_option("--seed", sc_seed, "Master seed");
  scan_cmd->add_option("--threads", sc_threads, "Worker threads (0: hardware concurrency)");
  scan_cmd->add_flag("--check", sc_check, "Exit 3 when a violation is found");
  scan_cmd->add_option("-o,--output", output, "Output path");
  scan_cmd->callback([&] {
    action = [&] {
      const auto rep = scan(sc_samples, sc_nmax, sc_lmax, sc_terms, sc_seed, sc_threads);
      json j = rep;
      j["n_max"] = sc_nmax;
      j["l_max"] = sc_lmax;
      j["terms"] = sc_terms;
      return detail::Emitted{detail::dump(j), sc_check && rep.violations > 0 ? check_failed : ok};
    };
  });

  // minimize
  OptimizeProblem mp;
  mp.seed = default_seed;
  bool mp_check = false;
  auto* minimize = app.add_subcommand("minimize", "Direct constrained minimization of <r^2><p^2>");
  minimize->add_option("--l2", mp.L2_target, "Target mean of L^2")->required();
  minimize->add_option("--r", mp.R_target, "Target variance of L^2")->required();
  minimize->add_option("--n-max", mp.n_max, "Largest radial number");
  minimize->add_option("--lmax", mp.l_max, "Largest angular number (0: automatic)");
  minimize->add_option("--restarts", mp.restarts, "Random restarts besides the warm start");
  minimize->add_option("--seed", mp.seed, "Seed for the random restarts");
  minimize->add_option("--tolerance", mp.tolerance, "Convergence tolerance");
  minimize->add_option("--memory", mp.memory, "Quasi-Newton memory (0: steepest descent)");
  minimize->add_flag("--check", mp_check, "Exit 3 on a bound violation or omega_min mismatch");
  minimize->add_option("-o,--output", output, "Output path");
  minimize->callback([&] {
    action = [&] {
      const auto res = minimize_product(mp);
      const int l_max = mp.l_max > 0 ? mp.l_max : default_l_max(mp.L2_target, mp.R_target);
      const double omega = omega_bound(BoundInputs::make(mp.L2_target, mp.R_target)).value;
      const double omin_value = omega_min_integer(mp.L2_target, mp.R_target, l_max).omega;
      const auto st = verify_stationarity(res);
      json j = res;
      j["omega_bound"] = omega;
      j["omega_min"] = omin_value;
      j["ground_level_weight"] = ground_level_weight(res.best_state);
      j["stationarity"] = {{"residual", st.residual},
                           {"support_levels", st.support_levels},
                           {"over_supported", st.over_supported},
                           {"degenerate_multipliers", st.degenerate_multipliers},
                           {"eta", st.multipliers.eta},
                           {"Lambda", st.multipliers.Lambda},
                           {"energy", st.multipliers.energy}};
      const bool bad = res.best_product < omega - bound_check_slack ||
                       std::abs(res.best_product - omin_value) > omega_min_match_tolerance;
      j["check_passed"] = !bad;
      return detail::Emitted{detail::dump(j), mp_check && bad ? check_failed : ok};
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return invalid_input;
  }

  if (!action) {
    err << app.help();
    return invalid_input;
  }

  detail::Emitted emitted;
  try {
    emitted = action();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return invalid_input;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return invalid_input;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return internal_failure;
  }

  if (output.empty()) {
    out << emitted.body;
  } else {
    std::ofstream file(output, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << output << "\n";
      return internal_failure;
    }
    file << emitted.body;
  }
  return emitted.code;
}

}  // namespace uncertainty::cli
