#pragma once

// The ruled-symmetric-space Gauss map G = F P1 F^T of a normalized frame,
// the diagonal normalization that produces the frame it needs, and the
// primitivity diagnostics that detect mean-curvature carriers through
// wrong-slot / wrong-eigenspace content of the connection coefficients.

#include <array>

#include "tlmls/frame.hpp"

namespace tlmls {

/// Multiply by diag(e^{-i L}, e^{-i L}, 1) pointwise, then fix the basepoint
/// determinant to 1 by a constant diagonal phase (principal square root).
inline MatField normalized_frame(const MatField& F, const RealField& L_im) {
  if (!F.same_grid(L_im))
    throw error("normalized_frame: fields on mismatched grids");
  MatField out = F.like<Mat3c>();
  for (int i = 0; i <= F.nu(); ++i)
    for (int j = 0; j <= F.nv(); ++j) {
      Complex ph = std::polar(1.0, -L_im.at(i, j));
      Mat3c D = Mat3c::Zero();
      D(0, 0) = ph;
      D(1, 1) = ph;
      D(2, 2) = 1.0;
      out.at(i, j) = F.at(i, j) * D;
    }
  Complex a = out.at(0, 0).determinant();
  if (std::abs(a) < 1e-12)
    throw error("normalized_frame: degenerate basepoint determinant");
  Complex c = std::sqrt(a);  // principal branch
  Mat3c adj = Mat3c::Zero();
  adj(0, 0) = Complex(1.0) / c;
  adj(1, 1) = Complex(1.0) / c;
  adj(2, 2) = 1.0;
  for (int i = 0; i <= F.nu(); ++i)
    for (int j = 0; j <= F.nv(); ++j) out.at(i, j) = out.at(i, j) * adj;
  return out;
}

/// Gauss-map representative G = F P1 F^T; right SO(1,1)-invariant.
inline Mat3c gauss3(const Mat3c& F) {
  return F * aut_P1() * F.transpose();
}

inline MatField gauss3_field(const MatField& F) {
  MatField out = F.like<Mat3c>();
  for (int i = 0; i <= F.nu(); ++i)
    for (int j = 0; j <= F.nv(); ++j) out.at(i, j) = gauss3(F.at(i, j));
  return out;
}

/// The hyperbolic one-parameter stabilizer diag(a, 1/a, 1).
inline Mat3c so11_element(double a) {
  if (a == 0.0) throw error("so11_element: parameter must be nonzero");
  Mat3c k = Mat3c::Zero();
  k(0, 0) = a;
  k(1, 1) = 1.0 / a;
  k(2, 2) = 1.0;
  return k;
}

// ---------------------------------------------------------------------------
// Reductive splitting of a connection-form node value.

/// alpha_k collects the 0th-eigenspace (diagonal a,-a,0) parts of both
/// direction coefficients; alpha_p_u / alpha_p_v are the complements, so
/// alpha_k + alpha_p_u + alpha_p_v reconstructs U + V exactly.
struct AlphaSplit {
  Mat3c alpha_k;
  Mat3c alpha_p_u;
  Mat3c alpha_p_v;
};

inline AlphaSplit split_alpha(const Mat3c& U, const Mat3c& V,
                              double trace_tol = 1e-9) {
  Mat3c ku = eigenspace_project(U, 0, trace_tol);
  Mat3c kv = eigenspace_project(V, 0, trace_tol);
  return {Mat3c(ku + kv), Mat3c(U - ku), Mat3c(V - kv)};
}

// ---------------------------------------------------------------------------
// Primitivity diagnostics.
//
// A connection family attached to a surface with vanishing mean-curvature
// carriers has u-form Laurent slots {-1, 0} with the -1 coefficient in the
// 5th eigenspace of the order-6 automorphism and the 0 coefficient in the
// 0th, and v-form slots {0, +1} with the +1 coefficient in the 1st
// eigenspace.  Everything outside that pattern is "offense": leaked
// eigenspace components plus whole coefficients sitting in forbidden slots.

namespace detail {
/// Largest eigenspace-component magnitude of X excluding index `keep`.
inline double eigen_leak(const Mat3c& X, int keep) {
  double leak = 0.0;
  for (const EigenComponent& c : eigenspace_split(X))
    if (c.index != keep) leak = std::max(leak, max_abs(c.part));
  return leak;
}
}  // namespace detail

/// Largest single offending magnitude (leaked eigenspace component or
/// forbidden-slot coefficient) of the two connection coefficients at one
/// node: first = u-direction, second = v-direction.
inline std::pair<double, double> primitive_offense(const MCForm& mc, int i,
                                                   int j) {
  LoopMatrix A = mc.u_loop(i, j), B = mc.v_loop(i, j);
  double u_off = std::max({detail::eigen_leak(A.coeff(-1), 5),
                           detail::eigen_leak(A.coeff(0), 0),
                           max_abs(A.coeff(1))});
  double v_off = std::max({max_abs(B.coeff(-1)),
                           detail::eigen_leak(B.coeff(0), 0),
                           detail::eigen_leak(B.coeff(1), 1)});
  return {u_off, v_off};
}

struct PrimitiveReport {
  double max_u_offense = 0.0;
  double max_v_offense = 0.0;
  bool primitive = false;
};

/// Scan the whole grid for primitivity offense.
inline PrimitiveReport primitive_check(const MCForm& mc, double tol = 1e-6) {
  PrimitiveReport rep;
  for (int i = 0; i <= mc.omega.nu(); ++i)
    for (int j = 0; j <= mc.omega.nv(); ++j) {
      auto [uo, vo] = primitive_offense(mc, i, j);
      rep.max_u_offense = std::max(rep.max_u_offense, uo);
      rep.max_v_offense = std::max(rep.max_v_offense, vo);
    }
  rep.primitive = rep.max_u_offense <= tol && rep.max_v_offense <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Stabilizer checks: the Gauss map must not see right multiplication by the
// hyperbolic stabilizer, and the order-6 group automorphism must fix it.

struct StabilizerReport {
  double fix_dev = 0.0;         // members: max of |k P1 k^T - P1|, |sigma(k)-k|
  double nonmember_move = 0.0;  // min movement of deliberate non-members
  bool ok = false;
};

inline StabilizerReport stabilizer_check() {
  StabilizerReport rep;
  rep.nonmember_move = std::numeric_limits<double>::infinity();
  const Mat3c P1 = aut_P1();
  for (double a : {0.5, 1.0, 1.3, 2.0, -1.0}) {
    Mat3c k = so11_element(a);
    rep.fix_dev = std::max(rep.fix_dev, max_abs(Mat3c(k * P1 * k.transpose() - P1)));
    rep.fix_dev = std::max(rep.fix_dev, max_abs(Mat3c(sigma_hat_grp(k) - k)));
  }
  std::array<Mat3c, 3> bad;
  bad[0] = Mat3c::Identity();
  bad[0](0, 2) = 0.5;
  bad[1] = Mat3c::Identity();
  bad[1](1, 2) = 0.3;
  bad[2] = Mat3c::Zero();
  bad[2](0, 0) = 2.0;
  bad[2](1, 1) = 1.0;
  bad[2](2, 2) = 0.5;
  for (const Mat3c& g : bad)
    rep.nonmember_move = std::min(
        rep.nonmember_move, max_abs(Mat3c(g * P1 * g.transpose() - P1)));
  rep.ok = rep.fix_dev <= 1e-12 && rep.nonmember_move >= 1e-3;
  return rep;
}

}  // namespace tlmls
