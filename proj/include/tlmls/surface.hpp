#pragma once

// The surface lift f = F e3 of an integrated frame, checks of the algebraic
// identities the lift must satisfy, recovery of the structure functions from
// a lift alone, projection to the complex hyperbolic quotient, two exact
// reference solutions (the rational parabolic-type surface and the constant
// vacuum torus-type surface), and CSV / OBJ exporters.

#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "tlmls/frame.hpp"

namespace tlmls {

/// A grid of homogeneous-coordinate lift vectors at one spectral parameter.
struct LiftField {
  Complex lambda;
  VecField f;
};

inline LiftField lift_from_frame(const FrameField& fr) {
  LiftField lf{fr.lambda, fr.F.like<Vec3c>()};
  for (int i = 0; i <= fr.F.nu(); ++i)
    for (int j = 0; j <= fr.F.nv(); ++j)
      lf.f.at(i, j) = fr.F.at(i, j).col(2);
  return lf;
}

/// Maximum deviations from the identities a proper lift satisfies:
/// <f,f> = -1, null derivative directions, tangency, real positive
/// <f_u,f_v>.  All derivative checks use second-order stencils.
struct LiftReport {
  double ff_plus_one = 0.0;   // max |<f,f> + 1|
  double fufu = 0.0;          // max |<f_u,f_u>|
  double fvfv = 0.0;          // max |<f_v,f_v>|
  double im_fufv = 0.0;       // max |Im <f_u,f_v>|
  double fuf = 0.0;           // max |<f_u,f>|
  double fvf = 0.0;           // max |<f_v,f>|
  double min_re_fufv = 0.0;   // min Re <f_u,f_v> (the conformal factor)
  bool degenerate = false;    // true when the conformal factor dips <= 0
};

inline LiftReport verify_lift(const LiftField& lf) {
  const VecField& f = lf.f;
  VecField fu = deriv_u(f), fv = deriv_v(f);
  LiftReport rep;
  rep.min_re_fufv = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= f.nu(); ++i)
    for (int j = 0; j <= f.nv(); ++j) {
      const Vec3c &z = f.at(i, j), &zu = fu.at(i, j), &zv = fv.at(i, j);
      rep.ff_plus_one =
          std::max(rep.ff_plus_one, std::abs(herm_form(z, z) + Complex(1.0)));
      rep.fufu = std::max(rep.fufu, std::abs(herm_form(zu, zu)));
      rep.fvfv = std::max(rep.fvfv, std::abs(herm_form(zv, zv)));
      Complex huv = herm_form(zu, zv);
      rep.im_fufv = std::max(rep.im_fufv, std::abs(huv.imag()));
      rep.fuf = std::max(rep.fuf, std::abs(herm_form(zu, z)));
      rep.fvf = std::max(rep.fvf, std::abs(herm_form(zv, z)));
      rep.min_re_fufv = std::min(rep.min_re_fufv, huv.real());
    }
  rep.degenerate = !(rep.min_re_fufv > 0.0);
  return rep;
}

/// Structure functions recovered from a lift alone.  Third-derivative
/// pairings use one-sided stencils near edges, so the spurious-real maxima
/// are reported over the two-line-margin interior where every stencil is
/// centered.
struct SurfaceInvariants {
  RealField e_omega;           // Re <f_u,f_v>
  RealField omega;             // its logarithm
  RealField q_rec, r_rec;      // Im <f_uuu,f>, Im <f_vvv,f>
  RealField l_rec, m_rec;      // Im <H,f_u>, Im <H,f_v>  (interior only)
  VecField H;                  // e^-omega f_uv - f       (interior only)
  double max_spurious_real = 0.0;
};

inline SurfaceInvariants recover_invariants(const LiftField& lf) {
  const VecField& f = lf.f;
  const int nu = f.nu(), nv = f.nv();
  if (nu < 4 || nv < 4)
    throw error("recover_invariants: need at least 4 cells per axis");
  VecField fu = deriv_u(f), fv = deriv_v(f), fuv = deriv_uv_interior(f);

  SurfaceInvariants inv{f.like<double>(), f.like<double>(), f.like<double>(),
                        f.like<double>(), f.like<double>(), f.like<double>(),
                        f.like<Vec3c>(),  0.0};
  for (int i = 0; i <= nu; ++i)
    for (int j = 0; j <= nv; ++j) {
      double e = herm_form(fu.at(i, j), fv.at(i, j)).real();
      if (!(e > 0.0))
        throw error("recover_invariants: conformal factor not positive at (" +
                    std::to_string(i) + "," + std::to_string(j) + ")");
      inv.e_omega.at(i, j) = e;
      inv.omega.at(i, j) = std::log(e);

      Complex Q = herm_form(third_deriv_u(f, i, j), f.at(i, j));
      Complex R = herm_form(third_deriv_v(f, i, j), f.at(i, j));
      inv.q_rec.at(i, j) = Q.imag();
      inv.r_rec.at(i, j) = R.imag();
      bool margin = i >= 2 && i <= nu - 2 && j >= 2 && j <= nv - 2;
      if (margin)
        inv.max_spurious_real = std::max(
            {inv.max_spurious_real, std::abs(Q.real()), std::abs(R.real())});

      if (i >= 1 && i < nu && j >= 1 && j < nv) {
        Vec3c H = std::exp(-inv.omega.at(i, j)) * fuv.at(i, j) - f.at(i, j);
        inv.H.at(i, j) = H;
        Complex l = herm_form(H, fu.at(i, j));
        Complex m = herm_form(H, fv.at(i, j));
        inv.l_rec.at(i, j) = l.imag();
        inv.m_rec.at(i, j) = m.imag();
        if (margin)
          inv.max_spurious_real = std::max(
              {inv.max_spurious_real, std::abs(l.real()), std::abs(m.real())});
      }
    }
  return inv;
}

/// Orthogonal projector onto the complex line of f with respect to the
/// indefinite form; represents the point of the quotient space.
inline Mat3c project_to_ch(const Vec3c& f) {
  Complex n = herm_form(f, f);
  if (std::abs(n) < 1e-12)
    throw error("project_to_ch: null vector has no projective image");
  return (f * (f.conjugate().transpose() * form_P())) / n;
}

// ---------------------------------------------------------------------------
// Exact reference solution 1: the rational surface with q = r = 0.

/// log(4 / (uv-2)^2), the exact structure solution on uv < 2.
inline double rp_omega(double u, double v) {
  double s = u * v - 2.0;
  return std::log(4.0 / (s * s));
}

/// Closed-form frame and lift for the rational surface at one spectral
/// parameter, on the branch with positive conformal factor through the
/// basepoint (F(0,0) = id).  N is the nilpotent with N^2 = E12, N^3 = 0.
inline std::pair<Mat3c, Vec3c> oracle_rp(double u, double v, Complex lambda) {
  if (lambda == Complex(0.0)) throw error("oracle_rp: lambda must be nonzero");
  if (u * v >= 2.0) throw error("oracle_rp: outside the branch domain uv < 2");
  const Complex a = u / lambda;      // coefficient of N
  const Complex b = lambda * v;      // coefficient of N^T
  const double ew2 = 2.0 / (2.0 - u * v);  // e^{omega/2} > 0 on this branch

  Mat3c L = Mat3c::Identity();       // exp(a N), N = E13 + E32
  L(0, 2) = a;
  L(2, 1) = a;
  L(0, 1) = 0.5 * a * a;
  Mat3c D = Mat3c::Zero();
  D(0, 0) = 1.0 / ew2;
  D(1, 1) = ew2;
  D(2, 2) = 1.0;
  Mat3c Rm = Mat3c::Identity();      // exp(b N^T)
  Rm(2, 0) = b;
  Rm(1, 2) = b;
  Rm(1, 0) = 0.5 * b * b;

  Mat3c F = L * D * Rm;
  Vec3c f;
  f << 2.0 * u / lambda, 2.0 * lambda * v, Complex(2.0 + u * v);
  f /= 2.0 - u * v;
  return {F, f};
}

// ---------------------------------------------------------------------------
// Exact reference solution 2: the constant vacuum (q = 1, r = -1, omega = 0).

/// Constant u-direction coefficient matrix of the vacuum at lambda = 1.
inline Mat3c clifford_U() {
  Mat3c U = Mat3c::Zero();
  U(0, 2) = 1.0;
  U(1, 0) = Complex(0.0, -1.0);
  U(2, 1) = 1.0;
  return U;
}

/// Constant v-direction coefficient matrix of the vacuum at lambda = 1.
inline Mat3c clifford_V() {
  Mat3c V = Mat3c::Zero();
  V(0, 1) = Complex(0.0, 1.0);
  V(1, 2) = 1.0;
  V(2, 0) = 1.0;
  return V;
}

/// Exact vacuum frame exp(u U / lambda + lambda v V); the two constant
/// coefficient matrices commute, so one exponential suffices.
inline Mat3c oracle_clifford(double u, double v, Complex lambda) {
  if (lambda == Complex(0.0))
    throw error("oracle_clifford: lambda must be nonzero");
  Mat3c X = (u / lambda) * clifford_U() + (lambda * v) * clifford_V();
  return mat_exp(X);
}

/// Diagonalized closed-form lift of the vacuum surface at lambda = 1.
inline Vec3c clifford_f0(double u, double v) {
  const Complex i(0.0, 1.0);
  const Complex d = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);   // primitive cube root
  const Complex d2 = d * d;
  Vec3c f;
  f << std::exp(i * (d * u - d2 * v)), -std::exp(i * (d2 * u - d * v)),
      std::exp(i * (u - v));
  return f / std::sqrt(3.0);
}

/// Constant change of basis with oracle_clifford(u,v,1) e3 = F0 clifford_f0.
inline Mat3c clifford_F0() {
  const Complex i(0.0, 1.0);
  const Complex d = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  const Complex d2 = d * d;
  Mat3c F0;
  F0 << -i * d2, i * d, -i, i * d, -i * d2, i, 1.0, -1.0, 1.0;
  return F0 / std::sqrt(3.0);
}

/// Max deviation of the vacuum lift from closing up after the given shift
/// along the line v = -u + a (period 2*pi; a half-period flips two
/// components and serves as the control).
inline double closure_check_clifford(double a, int samples,
                                     double shift = 2.0 * std::numbers::pi) {
  if (samples < 1) throw error("closure_check_clifford: need samples >= 1");
  double dev = 0.0;
  for (int k = 0; k < samples; ++k) {
    double t = 2.0 * std::numbers::pi * k / samples;
    Vec3c f1 = clifford_f0(t, a - t);
    Vec3c f2 = clifford_f0(t + shift, a - t - shift);
    dev = std::max(dev, max_abs(Vec3c(f2 - f1)));
  }
  return dev;
}

// ---------------------------------------------------------------------------
// Exporters.  All files use '\n' endings and %.17g numeric formatting.

namespace detail {
inline void write_fields(std::FILE* fp, const std::vector<double>& vals) {
  char buf[64];
  for (size_t k = 0; k < vals.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", vals[k]);
    std::fputs(buf, fp);
    std::fputc(k + 1 < vals.size() ? ',' : '\n', fp);
  }
}

struct FileCloser {
  std::FILE* fp;
  ~FileCloser() {
    if (fp) std::fclose(fp);
  }
};
}  // namespace detail

/// Homogeneous lift components as CSV rows u,v,re/im of each component.
inline void export_surface_csv(const std::string& path, const LiftField& lf) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw error("export_surface_csv: cannot open " + path);
  detail::FileCloser guard{fp};
  std::fputs("u,v,re_f1,im_f1,re_f2,im_f2,re_f3,im_f3\n", fp);
  for (int i = 0; i <= lf.f.nu(); ++i)
    for (int j = 0; j <= lf.f.nv(); ++j) {
      const Vec3c& z = lf.f.at(i, j);
      detail::write_fields(
          fp, {lf.f.u(i), lf.f.v(j), z(0).real(), z(0).imag(), z(1).real(),
               z(1).imag(), z(2).real(), z(2).imag()});
    }
}

/// Affine-chart coordinates w1 = f1/f3, w2 = f2/f3; nodes with |f3| below
/// the cutoff are skipped and counted in the return value.
inline int export_chart_csv(const std::string& path, const LiftField& lf,
                            double cutoff = 1e-12) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw error("export_chart_csv: cannot open " + path);
  detail::FileCloser guard{fp};
  std::fputs("u,v,re_w1,im_w1,re_w2,im_w2\n", fp);
  int skipped = 0;
  for (int i = 0; i <= lf.f.nu(); ++i)
    for (int j = 0; j <= lf.f.nv(); ++j) {
      const Vec3c& z = lf.f.at(i, j);
      if (std::abs(z(2)) < cutoff) {
        ++skipped;
        continue;
      }
      Complex w1 = z(0) / z(2), w2 = z(1) / z(2);
      detail::write_fields(fp, {lf.f.u(i), lf.f.v(j), w1.real(), w1.imag(),
                                w2.real(), w2.imag()});
    }
  return skipped;
}

/// Wavefront mesh of the chart image using (Re w1, Im w1, Re w2) as the
/// embedding; grid quads, skipping any face touching a near-null f3 node.
inline int export_obj(const std::string& path, const LiftField& lf,
                      double cutoff = 1e-12) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw error("export_obj: cannot open " + path);
  detail::FileCloser guard{fp};
  const int nu = lf.f.nu(), nv = lf.f.nv();
  std::vector<int> id(static_cast<size_t>(nu + 1) * (nv + 1), 0);
  int next = 1, skipped = 0;
  char buf[160];
  for (int i = 0; i <= nu; ++i)
    for (int j = 0; j <= nv; ++j) {
      const Vec3c& z = lf.f.at(i, j);
      if (std::abs(z(2)) < cutoff) {
        ++skipped;
        continue;
      }
      Complex w1 = z(0) / z(2), w2 = z(1) / z(2);
      std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", w1.real(),
                    w1.imag(), w2.real());
      std::fputs(buf, fp);
      id[static_cast<size_t>(i) * (nv + 1) + j] = next++;
    }
  auto vid = [&](int i, int j) {
    return id[static_cast<size_t>(i) * (nv + 1) + j];
  };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1),
          d = vid(i, j + 1);
      if (a && b && c && d) {
        std::snprintf(buf, sizeof buf, "f %d %d %d %d\n", a, b, c, d);
        std::fputs(buf, fp);
      }
    }
  return skipped;
}

}  // namespace tlmls
