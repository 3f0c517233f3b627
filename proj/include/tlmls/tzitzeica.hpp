#pragma once

// Characteristic (Goursat) marching for the hyperbolic equation
//
//   omega_uv = e^omega + q r e^{-2 omega},
//
// the real-carrier form of the structure equation with purely imaginary
// coefficients Q = i q(u), R = i r(v) (so that -Q R e^{-2 omega} = +q r
// e^{-2 omega}).  Data is posed on the two characteristic axes u = u0 and
// v = v0; the scheme is a single-pass predictor-corrector on each cell:
//
//   predictor  w* = w[i+1,j] + w[i,j+1] - w[i,j]
//   corrector  w[i+1,j+1] = w* + hu*hv * RHS(cell-average of w, midpoint q,r)
//
// which is second-order accurate in the cell diameter.

#include <vector>

#include "tlmls/grid.hpp"

namespace tlmls {

/// RHS carrier bookkeeping for purely imaginary coefficient pairs: with
/// Q = i q, R = i r and L-carriers l_im, m_im, the structure equation's right
/// side e^w - Q R e^{-2w} + m l reads e^w + q r e^{-2w} - m_im l_im.  Every
/// sign convention for imaginary carriers funnels through here.
inline double structure_rhs(double w, double q, double r, double l_im = 0.0,
                            double m_im = 0.0) {
  return std::exp(w) + q * r * std::exp(-2.0 * w) - m_im * l_im;
}

/// Goursat data: omega on the two characteristic axes, coefficient samples
/// q(u), r(v) at the axis nodes, and the domain rectangle.
struct GoursatData {
  std::vector<double> omega_u_axis;  // omega(u_i, v0), size nu+1
  std::vector<double> omega_v_axis;  // omega(u0, v_j), size nv+1
  std::vector<double> q;             // q(u_i), size nu+1
  std::vector<double> r;             // r(v_j), size nv+1
  double u0 = 0.0, u1 = 0.0, v0 = 0.0, v1 = 0.0;
  double l_im = 0.0, m_im = 0.0;     // constant mean-curvature carriers

  int nu() const { return static_cast<int>(omega_u_axis.size()) - 1; }
  int nv() const { return static_cast<int>(omega_v_axis.size()) - 1; }

  void validate() const {
    if (omega_u_axis.size() < 2 || omega_v_axis.size() < 2)
      throw error("GoursatData: need at least two nodes per axis");
    if (q.size() != omega_u_axis.size() || r.size() != omega_v_axis.size())
      throw error("GoursatData: q/r sample counts must match the axis nodes");
    if (!(u1 > u0) || !(v1 > v0))
      throw error("GoursatData: degenerate domain rectangle");
    if (std::abs(omega_u_axis[0] - omega_v_axis[0]) > 1e-14)
      throw error("GoursatData: axis data disagree at the corner");
  }
};

/// Solved field plus the coefficient samples it was produced with.
struct SolutionField {
  RealField omega;
  std::vector<double> q;  // q(u_i) along u nodes
  std::vector<double> r;  // r(v_j) along v nodes
};

/// March the characteristic scheme across the rectangle.  The axis rows of
/// the result are bit-exact copies of the input data.  Throws on blow-up
/// (non-finite or overflowing omega), naming the first offending cell.
inline SolutionField solve_goursat(const GoursatData& data) {
  data.validate();
  const int nu = data.nu(), nv = data.nv();
  const double hu = (data.u1 - data.u0) / nu;
  const double hv = (data.v1 - data.v0) / nv;

  SolutionField sol{RealField(nu, nv, data.u0, data.v0, hu, hv), data.q,
                    data.r};
  RealField& w = sol.omega;
  for (int i = 0; i <= nu; ++i) w.at(i, 0) = data.omega_u_axis[i];
  for (int j = 0; j <= nv; ++j) w.at(0, j) = data.omega_v_axis[j];

  for (int i = 0; i < nu; ++i) {
    const double qm = 0.5 * (data.q[i] + data.q[i + 1]);
    for (int j = 0; j < nv; ++j) {
      const double rm = 0.5 * (data.r[j] + data.r[j + 1]);
      const double pred = w.at(i + 1, j) + w.at(i, j + 1) - w.at(i, j);
      const double wmid =
          0.25 * (w.at(i, j) + w.at(i + 1, j) + w.at(i, j + 1) + pred);
      const double next =
          pred + hu * hv * structure_rhs(wmid, qm, rm, data.l_im, data.m_im);
      if (!std::isfinite(next) || std::abs(next) > 300.0)
        throw error("solve_goursat: solution blow-up at cell (" +
                    std::to_string(i + 1) + "," + std::to_string(j + 1) +
                    "), omega = " + std::to_string(next));
      w.at(i + 1, j + 1) = next;
    }
  }
  return sol;
}

/// Pointwise defect omega_uv - RHS on interior nodes, by centered second
/// differences; edge nodes are left at zero.
inline RealField tz_defect_field(const RealField& omega,
                                 const std::vector<double>& q,
                                 const std::vector<double>& r,
                                 double l_im = 0.0, double m_im = 0.0) {
  if (static_cast<int>(q.size()) != omega.nu() + 1 ||
      static_cast<int>(r.size()) != omega.nv() + 1)
    throw error("tz_defect_field: sample counts must match the grid");
  RealField wuv = deriv_uv_interior(omega);
  RealField d = omega.like<double>();
  for (int i = 1; i < omega.nu(); ++i)
    for (int j = 1; j < omega.nv(); ++j)
      d.at(i, j) =
          wuv.at(i, j) - structure_rhs(omega.at(i, j), q[i], r[j], l_im, m_im);
  return d;
}

/// Max-norm of the defect over interior nodes.
inline double residual(const RealField& omega, const std::vector<double>& q,
                       const std::vector<double>& r, double l_im = 0.0,
                       double m_im = 0.0) {
  return field_max_abs(tz_defect_field(omega, q, r, l_im, m_im));
}

inline double residual(const SolutionField& sol, double l_im = 0.0,
                       double m_im = 0.0) {
  return residual(sol.omega, sol.q, sol.r, l_im, m_im);
}

/// Residual maxima of the full structure system for not-necessarily-minimal
/// data: the sourced wave equation (eq1), closedness of the mean-curvature
/// carriers (eq2), and the two coefficient transport equations (eq3a/eq3b).
/// All fields live on one grid; q, r may vary in both variables here.
struct CompatReport {
  double eq1 = 0.0;   // w_uv - (e^w + q r e^{-2w} - m_im l_im)
  double eq2 = 0.0;   // l_im,v - m_im,u
  double eq3a = 0.0;  // q_v e^{-2w} + (e^{-w} l_im)_u
  double eq3b = 0.0;  // r_u e^{-2w} + (e^{-w} m_im)_v
};

inline CompatReport compatibility_check_general(const RealField& w,
                                                const RealField& q,
                                                const RealField& r,
                                                const RealField& l_im,
                                                const RealField& m_im) {
  if (!w.same_grid(q) || !w.same_grid(r) || !w.same_grid(l_im) ||
      !w.same_grid(m_im))
    throw error("compatibility_check_general: fields on mismatched grids");
  CompatReport rep;
  RealField wuv = deriv_uv_interior(w);
  RealField lv = deriv_v(l_im), mu = deriv_u(m_im);
  RealField qv = deriv_v(q), ru = deriv_u(r);

  RealField el = w.like<double>(), em = w.like<double>();
  for (int i = 0; i <= w.nu(); ++i)
    for (int j = 0; j <= w.nv(); ++j) {
      el.at(i, j) = std::exp(-w.at(i, j)) * l_im.at(i, j);
      em.at(i, j) = std::exp(-w.at(i, j)) * m_im.at(i, j);
    }
  RealField elu = deriv_u(el), emv = deriv_v(em);

  for (int i = 1; i < w.nu(); ++i)
    for (int j = 1; j < w.nv(); ++j) {
      const double e2 = std::exp(-2.0 * w.at(i, j));
      rep.eq1 = std::max(
          rep.eq1,
          std::abs(wuv.at(i, j) -
                   structure_rhs(w.at(i, j), q.at(i, j), r.at(i, j),
                                 l_im.at(i, j), m_im.at(i, j))));
      rep.eq2 = std::max(rep.eq2, std::abs(lv.at(i, j) - mu.at(i, j)));
      rep.eq3a =
          std::max(rep.eq3a, std::abs(qv.at(i, j) * e2 + elu.at(i, j)));
      rep.eq3b =
          std::max(rep.eq3b, std::abs(ru.at(i, j) * e2 + emv.at(i, j)));
    }
  return rep;
}

}  // namespace tlmls
