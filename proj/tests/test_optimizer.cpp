#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "uncertainty/optimizer.hpp"

using namespace uncertainty;
using Catch::Matchers::WithinAbs;

namespace {

OptimizeProblem problem(double L2, double R, int l_max = 0) {
  OptimizeProblem p;
  p.L2_target = L2;
  p.R_target = R;
  p.l_max = l_max;
  return p;
}

double omega(double L2, double R) { return omega_bound(BoundInputs::make(L2, R)).value; }

}  // namespace

TEST_CASE("quadratic forms", "[optimizer]") {
  const auto q = build_quadratic_forms(2, 6);
  REQUIRE(q.dim() == 21);
  for (int l = 0; l <= 6; ++l)
    for (int n = 0; n <= 2; ++n) {
      const auto i = q.index(n, l);
      CHECK(q.basis[static_cast<std::size_t>(i)] == QuantumNumbers{n, l, 0});
      CHECK(q.A(i, i) == 2 * n + l + 1.5);
      CHECK(q.B(i, i) == q.A(i, i));
    }
  CHECK(q.D2(q.index(0, 3)) == 12.0);
  CHECK(q.D4(q.index(1, 3)) == 144.0);
  CHECK((q.A - q.A.transpose()).norm() == 0.0);
  CHECK((q.B - q.B.transpose()).norm() == 0.0);
  // A and B differ only by the sign of the off-diagonal part.
  const Eigen::MatrixXd sum = q.A + q.B;
  CHECK((sum - Eigen::MatrixXd(sum.diagonal().asDiagonal())).norm() == 0.0);
  CHECK(q.A(q.index(0, 0), q.index(1, 0)) < 0.0);
  CHECK(q.B(q.index(0, 0), q.index(1, 0)) > 0.0);
  // Only dn = +-1 within one l couples.
  CHECK(q.A(q.index(0, 0), q.index(0, 2)) == 0.0);
  CHECK(q.A(q.index(0, 1), q.index(2, 1)) == 0.0);
  CHECK_THROWS_AS(build_quadratic_forms(-1, 3), std::invalid_argument);
}

TEST_CASE("objective gradient matches central differences", "[optimizer][gradient]") {
  const auto forms = build_quadratic_forms(2, 6, false);
  const detail::ProductObjective obj(forms, 3.0, 15.0);
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal;
  const double h = 1e-6;
  for (int point = 0; point < 50; ++point) {
    Eigen::VectorXd c(forms.dim());
    for (auto& v : c) v = normal(gen);
    c.normalize();
    const auto e = obj.evaluate(c);
    Eigen::VectorXd fd(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      Eigen::VectorXd up = c, down = c;
      up(i) += h;
      down(i) -= h;
      fd(i) = (obj.evaluate(up).f - obj.evaluate(down).f) / (2 * h);
    }
    CHECK((fd - e.grad_f).norm() <= 1e-5 * e.grad_f.norm());
    CHECK_THAT(e.g[0], WithinAbs(0.0, 1e-14));
  }
}

TEST_CASE("minimization reproduces the integer optimum", "[optimizer]") {
  const auto r = minimize_product(problem(3.0, 6.0, 6));
  REQUIRE(r.converged);
  CHECK_THAT(r.best_product, WithinAbs(2.625, 1e-4));
  CHECK(r.best_product >= omega(3.0, 6.0) - 1e-6);
  for (double res : r.constraint_residuals) CHECK(res < 1e-8);
  CHECK(ground_level_weight(r.best_state) > 1.0 - 1e-3);
  CHECK(r.restarts.run == 21);
  CHECK(r.restarts.converged >= 1);
  CHECK(r.restarts.below_warm_start == 0);
  CHECK(r.restarts.products.size() == 21);

  const auto st = verify_stationarity(r);
  CHECK(st.residual < 1e-6);
  CHECK(st.support_levels == 3);
  CHECK_FALSE(st.over_supported);
  CHECK_FALSE(st.degenerate_multipliers);
  CHECK_THAT(st.multipliers.eta, WithinAbs(-1.53125, 1e-4));
}

TEST_CASE("eigenstate targets", "[optimizer]") {
  const auto r = minimize_product(problem(2.0, 0.0));
  REQUIRE(r.converged);
  CHECK_THAT(r.best_product, WithinAbs(2.5, 1e-4));
  const auto st = verify_stationarity(r);
  CHECK(st.residual < 1e-6);
  CHECK(st.degenerate_multipliers);
  CHECK(st.support_levels == 1);
}

TEST_CASE("saturating two-level target", "[optimizer]") {
  const auto r = minimize_product(problem(2.0, 20.0));
  REQUIRE(r.converged);
  CHECK_THAT(r.best_product, WithinAbs(2.0, 1e-4));
  double weight = 0.0;
  for (const auto& t : r.best_state.terms())
    if (t.q.n == 0 && (t.q.l == 0 || t.q.l == 3)) weight += std::norm(t.amplitude);
  CHECK(weight > 1.0 - 1e-3);
  CHECK(verify_stationarity(r).residual < 1e-6);
}

TEST_CASE("perturbed states are not stationary", "[optimizer]") {
  const auto r = minimize_product(problem(3.0, 6.0, 6));
  auto terms = r.best_state.terms();
  terms.push_back({{1, 1, 0}, 0.05});
  const auto perturbed = SuperpositionState::normalized(terms);
  CHECK(verify_stationarity(perturbed, r.best_product).residual > 1e-3);
}

TEST_CASE("optimizer agrees with the integer search on random targets", "[optimizer][property]") {
  std::mt19937_64 gen(4242);
  std::uniform_real_distribution<double> uL2(0.5, 20.0), uR(0.0, 200.0);
  int done = 0;
  while (done < 8) {
    const double L2 = uL2(gen), R = uR(gen);
    if (R < min_variance(L2)) continue;
    auto p = problem(L2, R);
    p.restarts = 4;
    const auto r = minimize_product(p);
    const double target = omega_min_integer(L2, R, default_l_max(L2, R)).omega;
    CHECK_THAT(r.best_product, WithinAbs(target, 1e-4));
    CHECK(r.best_product >= omega(L2, R) - 1e-6);
    ++done;
  }
}

TEST_CASE("optimizer preconditions", "[optimizer]") {
  CHECK_THROWS_AS(minimize_product(problem(0.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(minimize_product(problem(3.0, 6.0, 2)), std::invalid_argument);
  CHECK_THROWS_AS(minimize_product(problem(3.0, -1.0)), std::invalid_argument);
  CHECK_THROWS_AS(minimize_product(problem(3.0, 1.0)), std::domain_error);
  auto p = problem(3.0, 6.0, 6);
  // The warm start is exact, so only an unreachable tolerance defeats every run.
  p.tolerance = 1e-30;
  p.max_inner_iterations = 50;
  p.restarts = 2;
  CHECK_THROWS_AS(minimize_product(p), std::runtime_error);
}
