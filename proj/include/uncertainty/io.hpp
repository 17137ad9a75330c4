#pragma once

// JSON encodings of the library's report types (nlohmann::json).
// Non-finite doubles are written as null and read back as NaN, except
// ScanReport::worst_margin whose null reads back as +inf (empty scan).

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "uncertainty/basis.hpp"
#include "uncertainty/bounds.hpp"
#include "uncertainty/constraints.hpp"
#include "uncertainty/optimizer.hpp"
#include "uncertainty/oracle.hpp"

namespace uncertainty {

using json = nlohmann::json;

namespace detail {

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline double number_or(const json& j, double fallback) {
  return j.is_null() ? fallback : j.get<double>();
}

inline Domain domain_from_string(const std::string& s) {
  for (auto d : {Domain::Dom1, Domain::Dom2, Domain::Degenerate, Domain::Infeasible})
    if (s == to_string(d)) return d;
  throw std::invalid_argument("unknown domain '" + s + "'");
}

}  // namespace detail

inline void to_json(json& j, const QuantumNumbers& q) { j = json{{"n", q.n}, {"l", q.l}, {"m", q.m}}; }

inline void from_json(const json& j, QuantumNumbers& q) {
  q = {j.at("n").get<int>(), j.at("l").get<int>(), j.at("m").get<int>()};
}

/// Array of {n, l, m, re, im}.
inline void to_json(json& j, const SuperpositionState& s) {
  j = json::array();
  for (const auto& t : s.terms())
    j.push_back({{"n", t.q.n}, {"l", t.q.l}, {"m", t.q.m}, {"re", t.amplitude.real()}, {"im", t.amplitude.imag()}});
}

inline void from_json(const json& j, SuperpositionState& s) {
  if (!j.is_array()) throw std::invalid_argument("state must be a JSON array");
  std::vector<Term> terms;
  for (const auto& e : j)
    terms.push_back({e.get<QuantumNumbers>(), Amplitude(e.at("re").get<double>(), e.at("im").get<double>())});
  s = SuperpositionState(std::move(terms));
}

inline void to_json(json& j, const MomentReport& m) {
  j = json{{"r2", m.r2}, {"p2", m.p2}, {"sigma_r", m.sigma_r}, {"sigma_p", m.sigma_p}, {"product", m.product}};
}

inline void from_json(const json& j, MomentReport& m) {
  m = {j.at("r2").get<double>(), j.at("p2").get<double>(), j.at("sigma_r").get<double>(),
       j.at("sigma_p").get<double>(), j.at("product").get<double>()};
}

inline void to_json(json& j, const AngularStats& a) {
  j = json{{"L2", a.L2_mean}, {"L4", a.L4_mean}, {"R", a.R}, {"F", a.F}};
}

inline void from_json(const json& j, AngularStats& a) {
  a = {j.at("L2").get<double>(), j.at("L4").get<double>(), j.at("R").get<double>(), j.at("F").get<double>()};
}

/// {l1, l2, l3, probs, omega, domain, eta, Lambda, energy, feasible, L2, F}
inline void to_json(json& j, const TripleSolution& s) {
  j = json{{"l1", s.l[0]},
           {"l2", s.l[1]},
           {"l3", s.l[2]},
           {"probs", s.probs},
           {"omega", detail::number_or_null(s.omega)},
           {"domain", to_string(s.domain)},
           {"feasible", s.feasible},
           {"L2", s.L2},
           {"F", s.F}};
  if (s.multipliers) {
    j["eta"] = s.multipliers->eta;
    j["Lambda"] = s.multipliers->Lambda;
    j["energy"] = s.multipliers->energy;
  } else {
    j["eta"] = nullptr;
    j["Lambda"] = nullptr;
    j["energy"] = nullptr;
  }
}

inline void from_json(const json& j, TripleSolution& s) {
  s = TripleSolution{};
  s.l = {j.at("l1").get<int>(), j.at("l2").get<int>(), j.at("l3").get<int>()};
  s.probs = j.at("probs").get<std::array<double, 3>>();
  s.omega = detail::number_or(j.at("omega"), std::numeric_limits<double>::quiet_NaN());
  s.domain = detail::domain_from_string(j.at("domain").get<std::string>());
  s.feasible = j.value("feasible", s.domain != Domain::Infeasible);
  s.L2 = j.value("L2", 0.0);
  s.F = j.value("F", 0.0);
  if (!j.at("eta").is_null())
    s.multipliers = Multipliers{j.at("eta").get<double>(), j.at("Lambda").get<double>(), j.at("energy").get<double>()};
}

inline void to_json(json& j, const ScanReport& r) {
  j = json{{"samples", r.samples},
           {"violations", r.violations},
           {"worst_margin", detail::number_or_null(r.worst_margin)},
           {"seed", r.seed},
           {"worst_index", r.worst_index}};
}

inline void from_json(const json& j, ScanReport& r) {
  r.samples = j.at("samples").get<std::int64_t>();
  r.violations = j.at("violations").get<std::int64_t>();
  r.worst_margin = detail::number_or(j.at("worst_margin"), std::numeric_limits<double>::infinity());
  r.seed = j.at("seed").get<std::uint64_t>();
  r.worst_index = j.value("worst_index", std::int64_t{-1});
}

inline void to_json(json& j, const RestartStats& s) {
  json products = json::array();
  for (double p : s.products) products.push_back(detail::number_or_null(p));
  j = json{{"run", s.run},
           {"converged", s.converged},
           {"warm_start_product", detail::number_or_null(s.warm_start_product)},
           {"below_warm_start", s.below_warm_start},
           {"spurious_minima", s.spurious_minima},
           {"products", products},
           {"converged_flags", s.converged_flags}};
}

inline void from_json(const json& j, RestartStats& s) {
  s.run = j.at("run").get<int>();
  s.converged = j.at("converged").get<int>();
  s.warm_start_product = detail::number_or(j.at("warm_start_product"), std::numeric_limits<double>::quiet_NaN());
  s.below_warm_start = j.at("below_warm_start").get<int>();
  s.spurious_minima = j.at("spurious_minima").get<int>();
  s.products.clear();
  for (const auto& p : j.at("products"))
    s.products.push_back(detail::number_or(p, std::numeric_limits<double>::infinity()));
  s.converged_flags = j.at("converged_flags").get<std::vector<bool>>();
}

inline void to_json(json& j, const OptimizeResult& r) {
  j = json{{"best_product", detail::number_or_null(r.best_product)},
           {"best_state", r.best_state},
           {"constraint_residuals", r.constraint_residuals},
           {"converged", r.converged},
           {"restarts", r.restarts}};
}

inline void from_json(const json& j, OptimizeResult& r) {
  r.best_product = detail::number_or(j.at("best_product"), std::numeric_limits<double>::quiet_NaN());
  r.best_state = j.at("best_state").get<SuperpositionState>();
  r.constraint_residuals = j.at("constraint_residuals").get<std::array<double, 3>>();
  r.converged = j.at("converged").get<bool>();
  r.restarts = j.at("restarts").get<RestartStats>();
}

}  // namespace uncertainty
