// Normalized frame, the symmetric-space Gauss map representative, the
// reductive splitting of connection values, and primitivity diagnostics.

#include <catch2/catch_amalgamated.hpp>

#include "tlmls/gaussmap.hpp"
#include "tlmls/surface.hpp"
#include "tlmls/tzitzeica.hpp"

using namespace tlmls;

namespace {
SolutionField rational_sampled(int n, double u1, double v1) {
  GoursatData d;
  d.omega_u_axis.assign(n + 1, 0.0);
  d.omega_v_axis.assign(n + 1, 0.0);
  d.q.assign(n + 1, 0.0);
  d.r.assign(n + 1, 0.0);
  d.u1 = u1;
  d.v1 = v1;
  SolutionField sol = solve_goursat(d);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      sol.omega.at(i, j) =
          rp_omega(sol.omega.u(i), sol.omega.v(j));
  return sol;
}

struct InjectedData {
  RealField w, q, r, l, m;
};
InjectedData injected_constant(int n, double c) {
  const double w0 = 0.0033388888372567734;
  RealField w(n, n, 0.0, 0.0, 0.5 / n, 0.5 / n, w0);
  return {w, w.like<double>(1.0), w.like<double>(-1.0), w.like<double>(c),
          w.like<double>(c)};
}
}  // namespace

TEST_CASE("Gauss representative of the identity frame") {
  Mat3c expect = Mat3c::Zero();
  expect(0, 1) = eps6_pow(2);
  expect(1, 0) = eps6_pow(4);
  expect(2, 2) = 1.0;
  REQUIRE(max_abs(Mat3c(aut_P1() - expect)) <= 1e-16);
  REQUIRE(max_abs(Mat3c(gauss3(Mat3c::Identity()) - expect)) <= 1e-16);
}

TEST_CASE("right stabilizer action is invisible to the Gauss map") {
  std::mt19937 gen(61);
  Mat3c F = random_mat3c(gen);
  for (double a : {2.0, 0.5, -1.0, 1.3}) {
    Mat3c k = so11_element(a);
    REQUIRE(max_abs(Mat3c(gauss3(Mat3c(F * k)) - gauss3(F))) <= 1e-13);
  }
  REQUIRE_THROWS_AS(so11_element(0.0), error);
}

TEST_CASE("left isometries act by congruence") {
  std::mt19937 gen(67);
  Mat3c F = random_mat3c(gen), A = random_mat3c(gen);
  Mat3c lhs = gauss3(Mat3c(A * F));
  Mat3c rhs = A * gauss3(F) * A.transpose();
  REQUIRE(max_abs(Mat3c(lhs - rhs)) <= 1e-13);
}

TEST_CASE("stabilizer membership report") {
  StabilizerReport rep = stabilizer_check();
  REQUIRE(rep.ok);
  REQUIRE(rep.fix_dev <= 1e-12);
  REQUIRE(rep.nonmember_move >= 1e-3);

  // A diagonal matrix outside the one-parameter subgroup moves the form.
  Mat3c bad = Mat3c::Zero();
  bad(0, 0) = 2.0;
  bad(1, 1) = 2.0;
  bad(2, 2) = 0.25;
  REQUIRE(max_abs(Mat3c(bad * aut_P1() * bad.transpose() - aut_P1())) >= 1.0);
  // The order-6 automorphism fixes stabilizer members.
  Mat3c k = so11_element(1.7);
  REQUIRE(max_abs(Mat3c(sigma_hat_grp(k) - k)) <= 1e-15);
}

TEST_CASE("normalization is the identity on a minimal unit-determinant frame") {
  SolutionField sol = rational_sampled(16, 0.5, 0.5);
  MCForm mc = build_minimal_mc(sol);
  FrameField fr = integrate_frame(mc, Complex(1.0));
  MatField Fh = normalized_frame(fr.F, mc.L_im);
  double dev = 0.0;
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j <= 16; ++j)
      dev = std::max(dev, max_abs(Mat3c(Fh.at(i, j) - fr.F.at(i, j))));
  REQUIRE(dev == 0.0);
}

TEST_CASE("normalization removes a varying determinant phase") {
  // Start from a flat general family with constant carriers, whose
  // integrated frame has unit determinant, and undo the diagonal phase to
  // fabricate an unnormalized frame; normalization must restore it.
  InjectedData d = injected_constant(12, 0.1);
  MCForm mc = build_general_mc(d.w, d.q, d.r, d.l, d.m);
  FrameField fr = integrate_frame(mc, Complex(1.0));

  MatField G = fr.F.like<Mat3c>();
  double det_dev_G = 0.0;
  for (int i = 0; i <= 12; ++i)
    for (int j = 0; j <= 12; ++j) {
      Complex ph = std::polar(1.0, mc.L_im.at(i, j));
      Mat3c Dinv = Mat3c::Zero();
      Dinv(0, 0) = ph;
      Dinv(1, 1) = ph;
      Dinv(2, 2) = 1.0;
      G.at(i, j) = fr.F.at(i, j) * Dinv;
      det_dev_G = std::max(det_dev_G,
                           std::abs(G.at(i, j).determinant() - Complex(1.0)));
    }
  REQUIRE(det_dev_G >= 1e-3);  // fabricated frame is genuinely unnormalized

  MatField Fh = normalized_frame(G, mc.L_im);
  double dev = 0.0, det_dev = 0.0;
  for (int i = 0; i <= 12; ++i)
    for (int j = 0; j <= 12; ++j) {
      dev = std::max(dev, max_abs(Mat3c(Fh.at(i, j) - fr.F.at(i, j))));
      det_dev = std::max(det_dev,
                         std::abs(Fh.at(i, j).determinant() - Complex(1.0)));
    }
  REQUIRE(dev <= 1e-13);
  // The restored determinant matches the integrated frame's, which carries
  // the integrator's own truncation error at this coarse step.
  REQUIRE(det_dev <= 1e-7);
}

TEST_CASE("determinant adjustment preserves the last column") {
  // Constant frame with determinant -i: adjusted to unit determinant by a
  // diagonal factor acting on the first two columns only.
  MatField F(4, 4, 0.0, 0.0, 0.25, 0.25);
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j) F.at(i, j) = clifford_F0();
  RealField L(4, 4, 0.0, 0.0, 0.25, 0.25);
  MatField Fh = normalized_frame(F, L);
  REQUIRE(std::abs(Fh.at(2, 2).determinant() - Complex(1.0)) <= 1e-14);
  REQUIRE(max_abs(Vec3c(Fh.at(2, 2).col(2) - clifford_F0().col(2))) == 0.0);

  RealField wrong(3, 3, 0.0, 0.0, 0.25, 0.25);
  REQUIRE_THROWS_AS(normalized_frame(F, wrong), error);
}

TEST_CASE("reductive splitting separates the eigenspace content") {
  SolutionField sol = rational_sampled(16, 0.5, 0.5);
  MCForm mc = build_minimal_mc(sol);
  Mat3c U = mc.U(7, 5, Complex(1.0)), V = mc.V(7, 5, Complex(1.0));
  AlphaSplit sp = split_alpha(U, V);

  REQUIRE(max_abs(Mat3c(sp.alpha_k + sp.alpha_p_u + sp.alpha_p_v - U - V)) <=
          1e-13);
  REQUIRE(max_abs(Mat3c(eigenspace_project(sp.alpha_k, 0) - sp.alpha_k)) <=
          1e-13);
  // Minimal connection: u-part entirely in the 5th eigenspace, v-part in
  // the 1st.
  for (int j = 0; j < 6; ++j) {
    double pu = max_abs(eigenspace_project(sp.alpha_p_u, j));
    double pv = max_abs(eigenspace_project(sp.alpha_p_v, j));
    if (j == 5)
      REQUIRE(pu >= 0.1);
    else
      REQUIRE(pu <= 1e-13);
    if (j == 1)
      REQUIRE(pv >= 0.1);
    else
      REQUIRE(pv <= 1e-13);
  }
}

TEST_CASE("carrier injection leaks into the forbidden eigenspace") {
  InjectedData d = injected_constant(8, 0.1);
  MCForm mc = build_general_mc(d.w, d.q, d.r, d.l, d.m);
  // Basepoint: the integrated carrier phase vanishes, so the only excess
  // content in the u-direction is the m-term sitting in eigenspace 1.
  Mat3c U = mc.U(0, 0, Complex(1.0)), V = mc.V(0, 0, Complex(1.0));
  AlphaSplit sp = split_alpha(U, V);
  double g1_in_u = max_abs(eigenspace_project(sp.alpha_p_u, 1));
  REQUIRE(std::abs(g1_in_u - 0.1) <= 1e-12);
  double g5_in_v = max_abs(eigenspace_project(sp.alpha_p_v, 5));
  REQUIRE(std::abs(g5_in_v - 0.1) <= 1e-12);
}

TEST_CASE("primitivity verdicts") {
  SolutionField sol = rational_sampled(16, 0.5, 0.5);
  PrimitiveReport min = primitive_check(build_minimal_mc(sol));
  REQUIRE(min.primitive);
  REQUIRE(min.max_u_offense <= 1e-12);
  REQUIRE(min.max_v_offense <= 1e-12);

  InjectedData d = injected_constant(16, 0.1);
  PrimitiveReport inj =
      primitive_check(build_general_mc(d.w, d.q, d.r, d.l, d.m));
  REQUIRE_FALSE(inj.primitive);
  REQUIRE(inj.max_u_offense >= 0.08);
  REQUIRE(inj.max_u_offense <= 0.12);
  REQUIRE(inj.max_v_offense >= 0.08);
  REQUIRE(inj.max_v_offense <= 0.12);
}

TEST_CASE("Gauss map ignores null-coordinate rescaling") {
  // The same surface parametrized with (u,v) -> (2u, v/2) and integrated
  // with the matching hyperbolic initial frame produces the same Gauss
  // representative at identical physical points.
  const int n = 256;
  SolutionField orig = rational_sampled(n, 0.5, 0.5);
  FrameField fr1 = integrate_frame(build_minimal_mc(orig), Complex(1.0));
  MatField g1 = gauss3_field(fr1.F);

  SolutionField scaled = rational_sampled(n, 1.0, 0.25);
  IntegrateOptions opts;
  opts.init = so11_element(0.5);
  FrameField fr2 = integrate_frame(build_minimal_mc(scaled), Complex(1.0), opts);
  MatField g2 = gauss3_field(fr2.F);

  double dev = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      dev = std::max(dev, max_abs(Mat3c(g1.at(i, j) - g2.at(i, j))));
  REQUIRE(dev <= 1e-6);
}
