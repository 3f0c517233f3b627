// Spectral-parameter connection family: assembly, flatness, integration,
// gauge moves, and the carrier-form line integral.

#include <catch2/catch_amalgamated.hpp>

#include "tlmls/frame.hpp"
#include "tlmls/surface.hpp"
#include "tlmls/tzitzeica.hpp"

using namespace tlmls;

namespace {
SolutionField clifford_solution(int n, double side) {
  GoursatData d;
  d.omega_u_axis.assign(n + 1, 0.0);
  d.omega_v_axis.assign(n + 1, 0.0);
  d.q.assign(n + 1, 1.0);
  d.r.assign(n + 1, -1.0);
  d.u1 = d.v1 = side;
  return solve_goursat(d);
}

SolutionField rational_sampled(int n, double side) {
  // Exact samples of the closed-form solution, bypassing the solver.
  GoursatData d;
  d.omega_u_axis.assign(n + 1, 0.0);
  d.omega_v_axis.assign(n + 1, 0.0);
  d.q.assign(n + 1, 0.0);
  d.r.assign(n + 1, 0.0);
  d.u1 = d.v1 = side;
  SolutionField sol = solve_goursat(d);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      sol.omega.at(i, j) = rp_omega(sol.omega.u(i), sol.omega.v(j));
  return sol;
}

// Constant background exactly compatible with both carriers at c = 0.1.
struct InjectedData {
  RealField w, q, r, l, m;
};
InjectedData injected_constant(int n) {
  const double w0 = 0.0033388888372567734, c = 0.1;
  RealField w(n, n, 0.0, 0.0, 0.5 / n, 0.5 / n, w0);
  return {w, w.like<double>(1.0), w.like<double>(-1.0), w.like<double>(c),
          w.like<double>(c)};
}
}  // namespace

TEST_CASE("vacuum connection matrices at unit and generic parameter") {
  SolutionField sol = clifford_solution(8, 1.0);
  MCForm mc = build_minimal_mc(sol);

  REQUIRE(max_abs(Mat3c(mc.U(3, 5, 1.0) - clifford_U())) <= 1e-15);
  REQUIRE(max_abs(Mat3c(mc.V(3, 5, 1.0) - clifford_V())) <= 1e-15);

  Complex l(0.7, 0.0);
  REQUIRE(max_abs(Mat3c(mc.U(2, 2, l) - clifford_U() / l)) <= 1e-15);
  REQUIRE(max_abs(Mat3c(mc.V(2, 2, l) - l * clifford_V())) <= 1e-15);
}

TEST_CASE("minimal connection matrices are traceless") {
  SolutionField sol = rational_sampled(16, 0.5);
  MCForm mc = build_minimal_mc(sol);
  for (Complex l : {Complex(1.0), Complex(0.7), Complex(0.5, 0.5)}) {
    REQUIRE(std::abs(mc.U(7, 9, l).trace()) <= 1e-14);
    REQUIRE(std::abs(mc.V(7, 9, l).trace()) <= 1e-14);
  }
  REQUIRE_THROWS_AS(mc.U(0, 0, Complex(0.0)), error);
}

TEST_CASE("assembled coefficient loops satisfy both twisting conditions") {
  SolutionField sol = rational_sampled(16, 0.5);
  MCForm mc = build_minimal_mc(sol);
  for (int i : {0, 5, 16})
    for (int j : {0, 9, 16}) {
      REQUIRE(twisted_loop_check(mc.u_loop(i, j)).ok);
      REQUIRE(twisted_loop_check(mc.v_loop(i, j)).ok);
    }
}

TEST_CASE("general assembly reduces to the minimal one without carriers") {
  SolutionField sol = rational_sampled(12, 0.5);
  MCForm min = build_minimal_mc(sol);
  RealField z = sol.omega.like<double>();
  RealField q = z, r = z;
  for (int i = 0; i <= 12; ++i)
    for (int j = 0; j <= 12; ++j) {
      q.at(i, j) = sol.q[i];
      r.at(i, j) = sol.r[j];
    }
  MCForm gen = build_general_mc(sol.omega, q, r, z, z);
  for (Complex l : {Complex(1.0), Complex(0.6, 0.3)}) {
    REQUIRE(max_abs(Mat3c(gen.U(4, 7, l) - min.U(4, 7, l))) <= 1e-15);
    REQUIRE(max_abs(Mat3c(gen.V(4, 7, l) - min.V(4, 7, l))) <= 1e-15);
  }
}

TEST_CASE("carrier-form line integral") {
  int n = 16;
  RealField z(n, n, 0.0, 0.0, 0.5 / n, 0.5 / n);

  LIntegral zero = compute_L_integral(z, z);
  REQUIRE(field_max_abs(zero.L_im) == 0.0);

  RealField l = z.like<double>(0.2), m = z.like<double>(-0.1);
  LIntegral lin = compute_L_integral(l, m);
  double dev = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      dev = std::max(dev, std::abs(lin.L_im.at(i, j) - 0.2 * z.u(i) +
                                   0.1 * z.v(j)));
  REQUIRE(dev <= 1e-12);

  RealField bad = z.like<double>();
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) bad.at(i, j) = z.v(j);
  REQUIRE_THROWS_AS(compute_L_integral(bad, z), error);
}

TEST_CASE("flatness of the vacuum family is exact at every parameter") {
  SolutionField sol = clifford_solution(16, 1.0);
  MCForm mc = build_minimal_mc(sol);
  for (Complex l : {Complex(1.0), Complex(0.7), eps6_pow(1),
                    std::polar(1.0, std::numbers::pi / 7.0)})
    REQUIRE(flatness_residual(mc, l) <= 1e-12);
}

TEST_CASE("flatness of the rational family at truncation order") {
  SolutionField sol = rational_sampled(32, 0.5);
  MCForm mc = build_minimal_mc(sol);
  for (Complex l : {Complex(1.0), Complex(0.7),
                    std::polar(1.0, std::numbers::pi / 7.0)})
    REQUIRE(flatness_residual(mc, l) <= 5e-3);
}

TEST_CASE("broken structure equation shows up as flatness residual") {
  SolutionField sol = rational_sampled(32, 0.5);
  double base = flatness_residual(build_minimal_mc(sol), Complex(1.0));
  for (int i = 0; i <= 32; ++i)
    for (int j = 0; j <= 32; ++j)
      sol.omega.at(i, j) += 1e-3 * sol.omega.u(i) * sol.omega.v(j);
  double pert = flatness_residual(build_minimal_mc(sol), Complex(1.0));
  REQUIRE(pert > 5.0 * base);
  REQUIRE(pert >= 5e-4);
}

TEST_CASE("carrier injection breaks flatness away from cube roots of unity") {
  InjectedData d = injected_constant(16);
  MCForm mc = build_general_mc(d.w, d.q, d.r, d.l, d.m);

  // With carriers on, the accumulated phase varies across the grid, so the
  // centered differences in the flatness assembly leave an O(h^2) remainder
  // even at parameters where the family is analytically flat.  The floor
  // sits near 1e-7 here; the non-flat parameters below sit near 1e-1.
  REQUIRE(flatness_residual(mc, Complex(1.0)) <= 1e-6);
  REQUIRE(flatness_residual(mc, eps6_pow(2)) <= 1e-6);
  REQUIRE(flatness_residual(mc, eps6_pow(4)) <= 1e-6);
  REQUIRE(flatness_residual(mc, Complex(0.7)) >= 1e-3);
  REQUIRE(flatness_residual(mc, Complex(-1.0)) >= 1e-3);
  REQUIRE(flatness_residual(mc, Complex(1.3)) >= 1e-3);
}

TEST_CASE("flatness field rotates equivariantly in the spectral parameter") {
  // The equivariance F(eps*lambda) = sigma_hat(F(lambda)) is an algebraic
  // identity for connections whose loops are twisted, i.e. minimal data;
  // carrier injection breaks the twisting and with it this identity.
  MCForm mc = build_minimal_mc(rational_sampled(8, 0.5));
  Complex l(0.7, 0.0);
  MatField at_l = flatness_field(mc, l * eps6());
  MatField at_rot = flatness_field(mc, l);
  double dev = 0.0;
  for (int i = 1; i < 8; ++i)
    for (int j = 1; j < 8; ++j)
      dev = std::max(dev, max_abs(Mat3c(sigma_hat_alg(at_rot.at(i, j)) -
                                        at_l.at(i, j))));
  REQUIRE(dev <= 1e-13);
}

TEST_CASE("one-step integrator is exact on a zero coefficient") {
  std::mt19937 gen(3);
  Mat3c F = random_mat3c(gen);
  Mat3c Z = Mat3c::Zero();
  REQUIRE(max_abs(Mat3c(detail::rk4_step(F, Z, Z, 0.1) - F)) == 0.0);
}

TEST_CASE("integrated vacuum frame matches the exponential formula") {
  SolutionField sol = clifford_solution(32, 1.0);
  MCForm mc = build_minimal_mc(sol);
  FrameField fr = integrate_frame(mc, Complex(1.0));
  REQUIRE(max_abs(Mat3c(fr.F.at(0, 0) - Mat3c::Identity())) == 0.0);
  double err = 0.0;
  for (int i = 0; i <= 32; ++i)
    for (int j = 0; j <= 32; ++j)
      err = std::max(err, max_abs(Mat3c(fr.F.at(i, j) -
                                        oracle_clifford(fr.F.u(i), fr.F.v(j),
                                                        Complex(1.0)))));
  REQUIRE(err <= 1e-5);
  REQUIRE(fr.max_drift <= 1e-7);
  REQUIRE(fr.max_det_dev <= 1e-7);
}

TEST_CASE("integrated rational frame matches the closed form") {
  SolutionField sol = rational_sampled(64, 0.5);
  MCForm mc = build_minimal_mc(sol);
  FrameField fr = integrate_frame(mc, Complex(1.0));
  double err = 0.0;
  for (int i = 0; i <= 64; ++i)
    for (int j = 0; j <= 64; ++j)
      err = std::max(err,
                     max_abs(Mat3c(fr.F.at(i, j) -
                                   oracle_rp(fr.F.u(i), fr.F.v(j), Complex(1.0))
                                       .first)));
  REQUIRE(err <= 1e-4);
  REQUIRE(fr.max_det_dev <= 1e-8);
}

TEST_CASE("integration order does not matter when the family is flat") {
  SolutionField vac = clifford_solution(16, 1.0);
  REQUIRE(path_independence(build_minimal_mc(vac), Complex(1.0)) <= 1e-10);

  SolutionField rp = rational_sampled(32, 0.5);
  REQUIRE(path_independence(build_minimal_mc(rp), Complex(1.0)) <= 1e-3);
}

TEST_CASE("path dependence tracks a non-flat parameter") {
  InjectedData d = injected_constant(16);
  MCForm mc = build_general_mc(d.w, d.q, d.r, d.l, d.m);
  double flat = path_independence(mc, Complex(1.0));
  // Integrating at a parameter where the family is not flat: suppress the
  // real-parameter drift abort, the frames leave the unitary group.
  IntegrateOptions opts;
  opts.drift_abort = std::numeric_limits<double>::infinity();
  double broken = path_independence(mc, Complex(0.7), opts);
  // At the unity parameter the only path sensitivity left is the O(h^2)
  // carrier-phase discretization floor of the assembled coefficients.
  REQUIRE(flat <= 1e-5);
  REQUIRE(broken >= 1e-3);
}

TEST_CASE("drift abort triggers for real parameters only") {
  SolutionField sol = rational_sampled(32, 0.5);
  MCForm mc = build_minimal_mc(sol);
  IntegrateOptions tight;
  tight.drift_abort = 1e-18;
  REQUIRE_THROWS_AS(integrate_frame(mc, Complex(1.0), tight), error);
  // Same bound, complex parameter: monitored but not enforced.
  FrameField fr =
      integrate_frame(mc, std::polar(1.0, std::numbers::pi / 7.0), tight);
  REQUIRE(fr.max_drift < 1.0);
}

TEST_CASE("diagonal gauge move") {
  REQUIRE_THROWS_AS(gauge_G(Complex(0.0)), error);
  REQUIRE_THROWS_AS(gauge_G(Complex(0.0, 1.0)), error);
  REQUIRE(max_abs(Mat3c(gauge_G(Complex(1.0)) - Mat3c::Identity())) == 0.0);

  SolutionField sol = clifford_solution(8, 1.0);
  FrameField fr = integrate_frame(build_minimal_mc(sol), Complex(1.0));
  FrameField g1 = gauge_by_G(fr, Complex(1.0));
  REQUIRE(max_abs(Mat3c(g1.F.at(5, 3) - fr.F.at(5, 3))) == 0.0);

  FrameField g2 = gauge_by_G(fr, Complex(2.0));
  REQUIRE(std::abs(g2.max_drift - fr.max_drift) <= 1e-12);
}

TEST_CASE("membership correction sweep reduces drift quadratically") {
  SolutionField sol = rational_sampled(24, 0.5);
  FrameField fr = integrate_frame(build_minimal_mc(sol), Complex(1.0));
  double before = fr.max_drift;
  reunitarize(fr);
  REQUIRE(fr.max_drift <= std::max(1e-12, before * before * 10.0));
  REQUIRE(fr.max_drift < before);
}
