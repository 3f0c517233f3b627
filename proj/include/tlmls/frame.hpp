#pragma once

// The spectral-parameter family of Maurer-Cartan forms attached to structure
// data (omega, q, r, and optionally the mean-curvature carriers l_im, m_im),
// its flatness residual, and 4th-order integration of the moving frame
// F^{-1} dF = U du + V dv from the basepoint.
//
// Matrices follow the convention (entries written for the general flavor;
// the minimal flavor is the special case l_im = m_im = 0, Lcal = 0):
//
//       | wu/2            lam*i*m    lam^-1 e^{w/2+iLcal} |
//   U = | -lam^-1 i q e^-w  -wu/2    0                    |
//       | 0          lam^-1 e^{w/2-iLcal}   0             |
//
//       | -wv/2        -lam i r e^-w    0                 |
//   V = | lam^-1 i l    wv/2            lam e^{w/2+iLcal} |
//       | lam e^{w/2-iLcal}   0         0                 |
//
// where Lcal is the path integral of the 1-form l du + m dv (purely
// imaginary; carried as the real field L_im with Lcal = i L_im).

#include "tlmls/grid.hpp"
#include "tlmls/loop_algebra.hpp"
#include "tlmls/tzitzeica.hpp"

namespace tlmls {

enum class MCFlavor { Minimal, General };

/// Trapezoidal path integral of the carrier 1-form l_im du + m_im dv from the
/// basepoint (first along u on the bottom row, then up each column), plus the
/// closedness deviation max |l_im,v - m_im,u| that path independence needs.
struct LIntegral {
  RealField L_im;
  double closedness_dev = 0.0;
};

inline LIntegral compute_L_integral(const RealField& l_im,
                                    const RealField& m_im,
                                    double closedness_tol = 1e-8) {
  if (!l_im.same_grid(m_im))
    throw error("compute_L_integral: carrier fields on mismatched grids");
  LIntegral out{l_im.like<double>(), 0.0};
  RealField lv = deriv_v(l_im), mu = deriv_u(m_im);
  for (int i = 0; i <= l_im.nu(); ++i)
    for (int j = 0; j <= l_im.nv(); ++j)
      out.closedness_dev =
          std::max(out.closedness_dev, std::abs(lv.at(i, j) - mu.at(i, j)));
  if (out.closedness_dev > closedness_tol)
    throw error("compute_L_integral: carrier form is not closed, deviation " +
                std::to_string(out.closedness_dev));

  RealField& L = out.L_im;
  for (int i = 1; i <= l_im.nu(); ++i)
    L.at(i, 0) = L.at(i - 1, 0) +
                 0.5 * l_im.hu() * (l_im.at(i - 1, 0) + l_im.at(i, 0));
  for (int i = 0; i <= l_im.nu(); ++i)
    for (int j = 1; j <= l_im.nv(); ++j)
      L.at(i, j) = L.at(i, j - 1) +
                   0.5 * m_im.hv() * (m_im.at(i, j - 1) + m_im.at(i, j));
  return out;
}

/// Structure data with everything the U/V evaluators need precomputed.
struct MCForm {
  MCFlavor flavor = MCFlavor::Minimal;
  RealField omega, omega_u, omega_v;
  RealField q, r;          // coefficient carriers as full fields
  RealField l_im, m_im;    // mean-curvature carriers (zero when minimal)
  RealField L_im;          // integral of the carrier form

  void check_lambda(Complex lambda) const {
    if (lambda == Complex(0.0))
      throw error("MCForm: spectral parameter must be nonzero");
  }

  Mat3c U(int i, int j, Complex lambda) const {
    check_lambda(lambda);
    const Complex il(0.0, 1.0);
    const Complex li = Complex(1.0) / lambda;
    const double w = omega.at(i, j);
    const double ew2 = std::exp(0.5 * w), emw = std::exp(-w);
    const Complex eL = std::polar(1.0, L_im.at(i, j));
    Mat3c M = Mat3c::Zero();
    M(0, 0) = 0.5 * omega_u.at(i, j);
    M(1, 1) = -M(0, 0);
    M(0, 1) = lambda * il * m_im.at(i, j);
    M(0, 2) = li * ew2 * eL;
    M(1, 0) = -li * il * q.at(i, j) * emw;
    M(2, 1) = li * ew2 / eL;
    return M;
  }

  Mat3c V(int i, int j, Complex lambda) const {
    check_lambda(lambda);
    const Complex il(0.0, 1.0);
    const Complex li = Complex(1.0) / lambda;
    const double w = omega.at(i, j);
    const double ew2 = std::exp(0.5 * w), emw = std::exp(-w);
    const Complex eL = std::polar(1.0, L_im.at(i, j));
    Mat3c M = Mat3c::Zero();
    M(0, 0) = -0.5 * omega_v.at(i, j);
    M(1, 1) = -M(0, 0);
    M(0, 1) = -lambda * il * r.at(i, j) * emw;
    M(1, 0) = li * il * l_im.at(i, j);
    M(1, 2) = lambda * ew2 * eL;
    M(2, 0) = lambda * ew2 / eL;
    return M;
  }

  /// The u-direction Laurent assembly: slots -1, 0, +1.
  LoopMatrix u_loop(int i, int j) const {
    const Complex il(0.0, 1.0);
    const double ew2 = std::exp(0.5 * omega.at(i, j));
    const double emw = std::exp(-omega.at(i, j));
    const Complex eL = std::polar(1.0, L_im.at(i, j));
    LoopMatrix g(-1, 1);
    g.coeff(-1)(0, 2) = ew2 * eL;
    g.coeff(-1)(1, 0) = -il * q.at(i, j) * emw;
    g.coeff(-1)(2, 1) = ew2 / eL;
    g.coeff(0)(0, 0) = 0.5 * omega_u.at(i, j);
    g.coeff(0)(1, 1) = -0.5 * omega_u.at(i, j);
    g.coeff(1)(0, 1) = il * m_im.at(i, j);
    return g;
  }

  /// The v-direction Laurent assembly: slots -1, 0, +1.
  LoopMatrix v_loop(int i, int j) const {
    const Complex il(0.0, 1.0);
    const double ew2 = std::exp(0.5 * omega.at(i, j));
    const double emw = std::exp(-omega.at(i, j));
    const Complex eL = std::polar(1.0, L_im.at(i, j));
    LoopMatrix g(-1, 1);
    g.coeff(-1)(1, 0) = il * l_im.at(i, j);
    g.coeff(0)(0, 0) = -0.5 * omega_v.at(i, j);
    g.coeff(0)(1, 1) = 0.5 * omega_v.at(i, j);
    g.coeff(1)(0, 1) = -il * r.at(i, j) * emw;
    g.coeff(1)(1, 2) = ew2 * eL;
    g.coeff(1)(2, 0) = ew2 / eL;
    return g;
  }
};

/// Minimal-flavor family from solved Goursat data: q, r extended constantly
/// across the grid, carriers zero.
inline MCForm build_minimal_mc(const SolutionField& sol) {
  MCForm mc;
  mc.flavor = MCFlavor::Minimal;
  mc.omega = sol.omega;
  mc.omega_u = deriv_u(sol.omega);
  mc.omega_v = deriv_v(sol.omega);
  mc.q = sol.omega.like<double>();
  mc.r = sol.omega.like<double>();
  for (int i = 0; i <= mc.omega.nu(); ++i)
    for (int j = 0; j <= mc.omega.nv(); ++j) {
      mc.q.at(i, j) = sol.q[i];
      mc.r.at(i, j) = sol.r[j];
    }
  mc.l_im = sol.omega.like<double>();
  mc.m_im = sol.omega.like<double>();
  mc.L_im = sol.omega.like<double>();
  return mc;
}

/// General-flavor family with mean-curvature carriers; computes the carrier
/// integral (throwing if the carrier form is not closed).
inline MCForm build_general_mc(const RealField& omega, const RealField& q,
                               const RealField& r, const RealField& l_im,
                               const RealField& m_im,
                               double closedness_tol = 1e-8) {
  if (!omega.same_grid(q) || !omega.same_grid(r) || !omega.same_grid(l_im) ||
      !omega.same_grid(m_im))
    throw error("build_general_mc: fields on mismatched grids");
  MCForm mc;
  mc.flavor = MCFlavor::General;
  mc.omega = omega;
  mc.omega_u = deriv_u(omega);
  mc.omega_v = deriv_v(omega);
  mc.q = q;
  mc.r = r;
  mc.l_im = l_im;
  mc.m_im = m_im;
  mc.L_im = compute_L_integral(l_im, m_im, closedness_tol).L_im;
  return mc;
}

/// Pointwise flatness defect U_v - V_u + [V,U] at one spectral parameter,
/// by centered differences on interior nodes (edges left at zero).
inline MatField flatness_field(const MCForm& mc, Complex lambda) {
  mc.check_lambda(lambda);
  const RealField& w = mc.omega;
  MatField Uf = w.like<Mat3c>(), Vf = w.like<Mat3c>();
  for (int i = 0; i <= w.nu(); ++i)
    for (int j = 0; j <= w.nv(); ++j) {
      Uf.at(i, j) = mc.U(i, j, lambda);
      Vf.at(i, j) = mc.V(i, j, lambda);
    }
  MatField out = w.like<Mat3c>();
  for (int i = 1; i < w.nu(); ++i)
    for (int j = 1; j < w.nv(); ++j) {
      Mat3c Uv = (Uf.at(i, j + 1) - Uf.at(i, j - 1)) / (2.0 * w.hv());
      Mat3c Vu = (Vf.at(i + 1, j) - Vf.at(i - 1, j)) / (2.0 * w.hu());
      const Mat3c &U = Uf.at(i, j), &V = Vf.at(i, j);
      out.at(i, j) = Uv - Vu + V * U - U * V;
    }
  return out;
}

/// Max-norm of the flatness defect over interior nodes.
inline double flatness_residual(const MCForm& mc, Complex lambda) {
  return field_max_abs(flatness_field(mc, lambda));
}

/// Integrated moving frame at one spectral parameter.
struct FrameField {
  Complex lambda;
  MatField F;
  RealField drift;           // per-node U(2,1)-membership residual
  double max_drift = 0.0;
  double max_det_dev = 0.0;  // per-node |det F - 1| maximum
};

struct IntegrateOptions {
  double drift_abort = 1e-4;  // hard bound, enforced for real lambda
  Mat3c init = Mat3c::Identity();
  bool v_first = false;  // integrate the v column first, then along u rows
};

namespace detail {
/// One classical 4th-order step of F' = F*A(t) with the midpoint coefficient
/// taken as the average of the endpoint node matrices.
inline Mat3c rk4_step(const Mat3c& F, const Mat3c& A0, const Mat3c& A1,
                      double h) {
  Mat3c Am = 0.5 * (A0 + A1);
  Mat3c k1 = F * A0;
  Mat3c k2 = (F + 0.5 * h * k1) * Am;
  Mat3c k3 = (F + 0.5 * h * k2) * Am;
  Mat3c k4 = (F + h * k3) * A1;
  return F + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}
}  // namespace detail

/// Integrate the frame across the grid (u-row first, then down each column;
/// or the transposed order).  Drift is recorded at every node; for real
/// spectral parameter, exceeding the hard bound aborts with diagnostics.
inline FrameField integrate_frame(const MCForm& mc, Complex lambda,
                                  const IntegrateOptions& opts = {}) {
  mc.check_lambda(lambda);
  const RealField& w = mc.omega;
  const bool real_lambda = std::abs(lambda.imag()) <= 1e-14;
  FrameField fr{lambda, w.like<Mat3c>(), w.like<double>(), 0.0, 0.0};

  auto record = [&](int i, int j) {
    const Mat3c& F = fr.F.at(i, j);
    double d = u21_residual(F);
    fr.drift.at(i, j) = d;
    fr.max_drift = std::max(fr.max_drift, d);
    fr.max_det_dev = std::max(
        fr.max_det_dev, std::abs(F.determinant() - Complex(1.0)));
    if (real_lambda && d > opts.drift_abort)
      throw error("integrate_frame: drift " + std::to_string(d) +
                  " exceeds hard bound at node (" + std::to_string(i) + "," +
                  std::to_string(j) + ")");
  };

  fr.F.at(0, 0) = opts.init;
  record(0, 0);
  if (!opts.v_first) {
    for (int i = 0; i < w.nu(); ++i) {
      fr.F.at(i + 1, 0) = detail::rk4_step(
          fr.F.at(i, 0), mc.U(i, 0, lambda), mc.U(i + 1, 0, lambda), w.hu());
      record(i + 1, 0);
    }
    for (int i = 0; i <= w.nu(); ++i)
      for (int j = 0; j < w.nv(); ++j) {
        fr.F.at(i, j + 1) = detail::rk4_step(
            fr.F.at(i, j), mc.V(i, j, lambda), mc.V(i, j + 1, lambda), w.hv());
        record(i, j + 1);
      }
  } else {
    for (int j = 0; j < w.nv(); ++j) {
      fr.F.at(0, j + 1) = detail::rk4_step(
          fr.F.at(0, j), mc.V(0, j, lambda), mc.V(0, j + 1, lambda), w.hv());
      record(0, j + 1);
    }
    for (int j = 0; j <= w.nv(); ++j)
      for (int i = 0; i < w.nu(); ++i) {
        fr.F.at(i + 1, j) = detail::rk4_step(
            fr.F.at(i, j), mc.U(i, j, lambda), mc.U(i + 1, j, lambda), w.hu());
        record(i + 1, j);
      }
  }
  return fr;
}

/// Max node-wise frame difference between the two integration orders; small
/// exactly when the family is flat at this spectral parameter.
inline double path_independence(const MCForm& mc, Complex lambda,
                                const IntegrateOptions& opts = {}) {
  IntegrateOptions a = opts, b = opts;
  a.v_first = false;
  b.v_first = true;
  FrameField fa = integrate_frame(mc, lambda, a);
  FrameField fb = integrate_frame(mc, lambda, b);
  double m = 0.0;
  for (int i = 0; i <= mc.omega.nu(); ++i)
    for (int j = 0; j <= mc.omega.nv(); ++j)
      m = std::max(m, max_abs(Mat3c(fa.F.at(i, j) - fb.F.at(i, j))));
  return m;
}

/// The gauge diag(lambda, 1/lambda, 1) relating the two frame conventions;
/// it lies in U(2,1) only for real nonzero lambda.
inline Mat3c gauge_G(Complex lambda) {
  if (lambda == Complex(0.0)) throw error("gauge_G: lambda must be nonzero");
  if (std::abs(lambda.imag()) > 1e-14)
    throw error("gauge_G: the gauge is in U(2,1) only for real lambda");
  Mat3c G = Mat3c::Zero();
  G(0, 0) = lambda;
  G(1, 1) = Complex(1.0) / lambda;
  G(2, 2) = 1.0;
  return G;
}

/// Right-multiply every node by the gauge; drift is recomputed.
inline FrameField gauge_by_G(const FrameField& fr, Complex lambda) {
  Mat3c G = gauge_G(lambda);
  FrameField out = fr;
  out.max_drift = 0.0;
  out.max_det_dev = 0.0;
  for (int i = 0; i <= fr.F.nu(); ++i)
    for (int j = 0; j <= fr.F.nv(); ++j) {
      out.F.at(i, j) = fr.F.at(i, j) * G;
      double d = u21_residual(out.F.at(i, j));
      out.drift.at(i, j) = d;
      out.max_drift = std::max(out.max_drift, d);
      out.max_det_dev = std::max(
          out.max_det_dev, std::abs(out.F.at(i, j).determinant() - Complex(1.0)));
    }
  return out;
}

/// Optional Newton correction toward P conj(F)^T P F = id (off by default in
/// every pipeline; provided for drift experiments).  Each sweep applies
/// F <- F (id - E/2) with E the membership defect, converging quadratically.
inline void reunitarize(FrameField& fr, int sweeps = 1) {
  const Mat3c& P = form_P();
  for (int s = 0; s < sweeps; ++s) {
    fr.max_drift = 0.0;
    fr.max_det_dev = 0.0;
    for (int i = 0; i <= fr.F.nu(); ++i)
      for (int j = 0; j <= fr.F.nv(); ++j) {
        Mat3c& F = fr.F.at(i, j);
        Mat3c E = P * F.transpose() * P * F.conjugate() - Mat3c::Identity();
        F = F * (Mat3c::Identity() - 0.5 * E.conjugate());
        double d = u21_residual(F);
        fr.drift.at(i, j) = d;
        fr.max_drift = std::max(fr.max_drift, d);
        fr.max_det_dev = std::max(
            fr.max_det_dev, std::abs(F.determinant() - Complex(1.0)));
      }
  }
}

}  // namespace tlmls
