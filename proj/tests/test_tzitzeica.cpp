// Characteristic marching solver for the structure equation and the
// finite-difference compatibility checks.

#include <catch2/catch_amalgamated.hpp>

#include "tlmls/surface.hpp"
#include "tlmls/tzitzeica.hpp"

using namespace tlmls;

namespace {
GoursatData zero_boundary_data(int n, double side, double qval, double rval) {
  GoursatData d;
  d.omega_u_axis.assign(n + 1, 0.0);
  d.omega_v_axis.assign(n + 1, 0.0);
  d.q.assign(n + 1, qval);
  d.r.assign(n + 1, rval);
  d.u0 = 0.0;
  d.u1 = side;
  d.v0 = 0.0;
  d.v1 = side;
  return d;
}

double rational_solution_error(int n) {
  SolutionField sol = solve_goursat(zero_boundary_data(n, 0.5, 0.0, 0.0));
  double err = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      err = std::max(err, std::abs(sol.omega.at(i, j) -
                                   rp_omega(sol.omega.u(i), sol.omega.v(j))));
  return err;
}
}  // namespace

TEST_CASE("marched field matches the rational closed form") {
  REQUIRE(rational_solution_error(64) <= 1e-3);
}

TEST_CASE("error drops at second order under grid refinement") {
  double e1 = rational_solution_error(64);
  double e2 = rational_solution_error(128);
  double ratio = e1 / e2;
  REQUIRE(ratio >= 3.5);
  REQUIRE(ratio <= 4.5);
}

TEST_CASE("flat-torus data solves to the zero field exactly") {
  SolutionField sol = solve_goursat(zero_boundary_data(32, 1.0, 1.0, -1.0));
  REQUIRE(field_max_abs(sol.omega) == 0.0);
  REQUIRE(residual(sol) == 0.0);
}

TEST_CASE("axis rows of the output replicate the input bit-exactly") {
  GoursatData d = zero_boundary_data(16, 0.5, 0.0, 0.0);
  for (int i = 0; i <= 16; ++i)
    d.omega_u_axis[i] = 0.01 * i * i - 0.003 * i;
  d.omega_v_axis[0] = d.omega_u_axis[0];
  for (int j = 1; j <= 16; ++j) d.omega_v_axis[j] = 0.002 * j;
  SolutionField sol = solve_goursat(d);
  for (int i = 0; i <= 16; ++i)
    REQUIRE(sol.omega.at(i, 0) == d.omega_u_axis[i]);
  for (int j = 0; j <= 16; ++j)
    REQUIRE(sol.omega.at(0, j) == d.omega_v_axis[j]);
}

TEST_CASE("blow-up is reported with the first offending cell") {
  GoursatData d = zero_boundary_data(4, 1.0, 0.0, 0.0);
  d.omega_u_axis.assign(5, 12.0);
  d.omega_v_axis.assign(5, 12.0);
  REQUIRE_THROWS_WITH(solve_goursat(d),
                      Catch::Matchers::ContainsSubstring("cell (1,1)"));
}

TEST_CASE("defect field reference values") {
  int n = 32;
  RealField zero(n, n, 0.0, 0.0, 1.0 / n, 1.0 / n);
  std::vector<double> ones(n + 1, 1.0), negones(n + 1, -1.0),
      zeros(n + 1, 0.0);

  // Balanced coefficients: zero defect everywhere.
  REQUIRE(residual(zero, ones, negones) == 0.0);

  // No coefficients: the exponential term is unbalanced, defect is -1.
  RealField d = tz_defect_field(zero, zeros, zeros);
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) REQUIRE(d.at(i, j) == -1.0);

  // Exactly sampled analytic solution: defect at truncation order.
  RealField w(n, n, 0.0, 0.0, 0.5 / n, 0.5 / n);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) w.at(i, j) = rp_omega(w.u(i), w.v(j));
  REQUIRE(residual(w, zeros, zeros) <= 1e-2);
  REQUIRE(residual(w, zeros, zeros) > 0.0);
}

TEST_CASE("full compatibility system on a minimal solution") {
  int n = 48;
  SolutionField sol = solve_goursat(zero_boundary_data(n, 0.5, 0.0, 0.0));
  RealField q = sol.omega.like<double>(), r = sol.omega.like<double>();
  RealField l = sol.omega.like<double>(), m = sol.omega.like<double>();
  CompatReport rep = compatibility_check_general(sol.omega, q, r, l, m);
  REQUIRE(rep.eq1 <= 1e-3);
  REQUIRE(rep.eq2 == 0.0);
  REQUIRE(rep.eq3a == 0.0);
  REQUIRE(rep.eq3b == 0.0);
}

TEST_CASE("closedness violation is visible in the second equation") {
  int n = 16;
  RealField zero(n, n, 0.0, 0.0, 1.0 / n, 1.0 / n);
  RealField q = zero.like<double>(), r = zero.like<double>();
  RealField l = zero.like<double>(), m = zero.like<double>();
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) l.at(i, j) = l.v(j);
  CompatReport rep = compatibility_check_general(zero, q, r, l, m);
  REQUIRE(std::abs(rep.eq2 - 1.0) <= 1e-12);
}

TEST_CASE("constant carriers on the adjusted constant background") {
  // Root of e^w - e^{-2w} = c^2 for c = 0.1: an exactly compatible constant
  // configuration once both carriers are switched on.
  const double w0 = 0.0033388888372567734;
  const double c = 0.1;
  REQUIRE(std::abs(std::exp(w0) - std::exp(-2.0 * w0) - c * c) <= 1e-12);

  int n = 16;
  RealField w(n, n, 0.0, 0.0, 0.5 / n, 0.5 / n, w0);
  RealField q = w.like<double>(1.0), r = w.like<double>(-1.0);
  RealField l = w.like<double>(c), m = w.like<double>(c);

  CompatReport with = compatibility_check_general(w, q, r, l, m);
  REQUIRE(with.eq1 <= 1e-12);
  REQUIRE(with.eq2 <= 1e-12);
  REQUIRE(with.eq3a <= 1e-12);
  REQUIRE(with.eq3b <= 1e-12);

  // Dropping the carriers shifts the first equation by exactly c^2.
  RealField z = w.like<double>();
  CompatReport without = compatibility_check_general(w, q, r, z, z);
  REQUIRE(std::abs(without.eq1 - c * c) <= 1e-12);
}

TEST_CASE("input validation catches malformed data") {
  GoursatData d = zero_boundary_data(8, 0.5, 0.0, 0.0);
  d.omega_v_axis[0] = 1.0;  // corner mismatch
  REQUIRE_THROWS_AS(solve_goursat(d), error);

  GoursatData e2 = zero_boundary_data(8, 0.5, 0.0, 0.0);
  e2.q.resize(3);
  REQUIRE_THROWS_AS(solve_goursat(e2), error);

  GoursatData e3 = zero_boundary_data(8, 0.5, 0.0, 0.0);
  e3.u1 = 0.0;
  REQUIRE_THROWS_AS(solve_goursat(e3), error);
}
