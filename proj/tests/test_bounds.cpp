#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "uncertainty/bounds.hpp"

using namespace uncertainty;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
double omega(double L2, double R) { return omega_bound(BoundInputs::make(L2, R)).value; }
}  // namespace

TEST_CASE("heisenberg bound is three halves", "[bounds]") {
  CHECK(heisenberg_bound().value == 1.5);
  CHECK(heisenberg_bound().kind == BoundKind::Heisenberg);
  CHECK(heisenberg_bound().value == pj_bound(0).value);
}

TEST_CASE("eigenstate bound is l + 3/2", "[bounds]") {
  CHECK(pj_bound(1).value == 2.5);
  CHECK(pj_bound(10).value == 11.5);
  CHECK(pj_bound(3).kind == BoundKind::Eigenstate);
  CHECK_THROWS_AS(pj_bound(-1), std::invalid_argument);
}

TEST_CASE("bound inputs are validated", "[bounds]") {
  CHECK(BoundInputs::make(3, 6).F() == 15.0);
  CHECK_THROWS_AS(BoundInputs::make(-1, 0), std::invalid_argument);
  CHECK_THROWS_AS(BoundInputs::make(1, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(BoundInputs::make(NAN, 0), std::invalid_argument);
  CHECK_THROWS_AS(BoundInputs::make(1, INFINITY), std::invalid_argument);
  CHECK_THROWS_AS(omega_bound(BoundInputs{-1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("omega reduces to heisenberg at zero angular momentum", "[bounds]") {
  for (double R : {0.0, 1.0, 1e3, 1e6}) {
    CHECK(omega(0.0, R) == 1.5);
    CHECK(omega_bound_printed(BoundInputs::make(0.0, R)).value == 1.5);
  }
}

TEST_CASE("omega reduces to the eigenstate bound when R = 0", "[bounds]") {
  for (int l = 0; l <= 50; ++l) CHECK_THAT(omega(l * (l + 1.0), 0.0), WithinAbs(l + 1.5, 1e-12));
}

TEST_CASE("omega matches high-precision reference values", "[bounds]") {
  // 40-digit evaluations of the direct form.
  CHECK_THAT(omega(3, 6), WithinAbs(2.574772708486752002, 1e-14));
  CHECK_THAT(omega(2, 20), WithinAbs(2.0, 1e-14));
  CHECK_THAT(omega(1, 1), WithinAbs(2.0, 1e-14));
  CHECK_THAT(omega(10, 1000), WithinAbs(2.4090909090909090909, 1e-14));
  CHECK_THAT(omega(0.5, 1e6), WithinAbs(1.5003534283685274362, 1e-14));
  CHECK_THAT(omega(50, 0.25), WithinAbs(8.0884172616881541024, 1e-13));
  CHECK_THAT(omega(3, 6), WithinAbs(1.5 + 6.0 / (std::sqrt(21.0) + 1.0), 1e-14));
}

TEST_CASE("stable and direct forms agree where both are accurate", "[bounds]") {
  for (double L2 : {0.1, 1.0, 2.0, 7.5, 30.0, 200.0})
    for (double R : {0.0, 0.5, 10.0, 300.0}) {
      const auto in = BoundInputs::make(L2, R);
      CHECK_THAT(omega_bound(in).value, WithinRel(omega_bound_printed(in).value, 1e-12));
    }
}

TEST_CASE("omega is at least 3/2, increasing in L2 and non-increasing in R", "[bounds][property]") {
  for (double L2 = 0.0; L2 <= 40.0; L2 += 0.37)
    for (double R = 0.0; R <= 500.0; R += 13.1) {
      const double w = omega(L2, R);
      CHECK(w >= 1.5);
      CHECK(omega(L2, R + 1.0) <= w);
      CHECK(omega(L2 + 0.01, R) >= w);
    }
}

TEST_CASE("continuous optimum", "[bounds]") {
  CHECK(continuous_level(BoundInputs::make(2, 0)) == 1.0);
  CHECK(continuous_level(BoundInputs::make(6, 0)) == 2.0);
  CHECK_THAT(continuous_level(BoundInputs::make(3, 6)), WithinAbs((std::sqrt(21.0) - 1.0) / 2.0, 1e-15));
  // F = L2 k(k+1) puts the optimum exactly at k.
  for (int k = 1; k <= 12; ++k) {
    const double L2 = 0.7 * k;
    const double F = L2 * k * (k + 1.0);
    CHECK(continuous_level(BoundInputs::make(L2, F - L2 * L2)) == static_cast<double>(k));
  }
  const auto opt = optimal_l_continuous(BoundInputs::make(3, 6));
  CHECK(opt.l3 == 0.0);
  CHECK_THROWS_AS(continuous_level(BoundInputs::make(0, 5)), std::invalid_argument);
}

TEST_CASE("omega is the value of the continuous optimum", "[bounds]") {
  // Omega = 3/2 + L2 / (1 + x) with x the continuous optimum.
  for (double L2 : {0.3, 2.0, 5.0, 17.0})
    for (double R : {0.0, 3.0, 80.0}) {
      const auto in = BoundInputs::make(L2, R);
      CHECK_THAT(omega_bound(in).value, WithinAbs(1.5 + L2 / (1.0 + continuous_level(in)), 1e-12));
    }
}

TEST_CASE("W is evaluated verbatim", "[bounds][audit]") {
  CHECK_THAT(closed_form_W(BoundInputs::make(2, 0)).value, WithinAbs(3.0, 1e-12));
  CHECK_THAT(closed_form_W(BoundInputs::make(3, 6)).value, WithinAbs(4.5, 1e-12));
  CHECK(closed_form_W(BoundInputs::make(3, 6)).kind == BoundKind::W);
  CHECK(std::string(to_string(BoundKind::W)) == "w_as_printed");
  // Both exceed the eigenstate bound the search attains (2.5 and 2.625).
  CHECK(closed_form_W(BoundInputs::make(2, 0)).value > 2.5);
  CHECK(closed_form_W(BoundInputs::make(3, 6)).value > 2.625);
}

TEST_CASE("curve grid and reference trace", "[bounds]") {
  const auto rows = curve(1e3, 0.0, 10.0, 101);
  REQUIRE(rows.size() == 101);
  CHECK(rows.front().L == 0.0);
  CHECK(rows.back().L == 10.0);
  CHECK_THAT(rows[50].L, WithinAbs(5.0, 1e-14));
  for (const auto& r : rows) {
    CHECK_THAT(r.omega, WithinAbs(omega(r.L * r.L, 1e3), 0.0));
    CHECK(r.pj_reference >= r.omega - 1e-12);
  }
  // L = sqrt(l(l+1)) recovers l + 3/2.
  CHECK_THAT(pj_reference(std::sqrt(12.0)), WithinAbs(4.5, 1e-14));
  CHECK_THROWS_AS(curve(1e3, 0.0, 10.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(curve(1e3, 5.0, 5.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(curve(-1.0, 0.0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(curve(1.0, -1.0, 1.0, 10), std::invalid_argument);
}

TEST_CASE("decimal formatting", "[bounds][csv]") {
  CHECK(format_decimal(0.0) == "0");
  CHECK(format_decimal(1.5) == "1.5");
  CHECK(format_decimal(10.0) == "10");
  CHECK(format_decimal(2.0 / 3.0) == "0.666666666666667");
  CHECK(format_decimal(1e-7) == "0.0000001");
  CHECK(format_decimal(-2.5e-6) == "-0.0000025");
  CHECK(format_decimal(123456789012345678.0).find('e') == std::string::npos);
  CHECK_THROWS_AS(format_decimal(NAN), std::invalid_argument);

  std::ostringstream os;
  write_curve_csv(os, {{0.0, 1.5, 1.5}, {1.0, 2.0, 2.618033988749895}});
  CHECK(os.str() == "L,omega,pj_reference\n0,1.5,1.5\n1,2,2.61803398874989\n");
}

TEST_CASE("omega on a wide grid", "[bounds][property]") {
  CHECK(omega(2.0, 1e12) - 1.5 < 1e-4);
  for (int i = 0; i < 50; ++i) {
    const double L2 = 0.1 + (100.0 - 0.1) * i / 49.0;
    double previous = INFINITY;
    for (int j = 0; j < 50; ++j) {
      const double R = 1e4 * j / 49.0;
      const auto in = BoundInputs::make(L2, R);
      const double w = omega_bound(in).value;
      CHECK(w >= 1.5);
      CHECK(w - previous <= 1e-12);
      CHECK_THAT(w, WithinRel(omega_bound_printed(in).value, 1e-12));
      previous = w;
    }
  }
}

TEST_CASE("continuous optimum reference points", "[bounds]") {
  CHECK_THAT(optimal_l_continuous(BoundInputs::make(2, 20)).l12, WithinAbs(3.0, 1e-14));
  for (int l = 1; l <= 10; ++l)
    CHECK(optimal_l_continuous(BoundInputs::make(l * (l + 1.0), 0)).l12 == static_cast<double>(l));
}
