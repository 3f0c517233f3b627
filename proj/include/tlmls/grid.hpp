#pragma once

// Rectangular tensor grids over a (u,v) domain and the finite-difference
// stencils shared by the solver, the flatness residual, and invariant
// recovery.  Nodes are (nu+1) x (nv+1) with index (i,j) at
// (u0 + i*hu, v0 + j*hv); storage is row-major in i.

#include <cmath>
#include <vector>

#include "tlmls/linalg.hpp"

namespace tlmls {

namespace detail {
/// Zero element of a node type; Eigen's default constructor does not zero,
/// so anything offering a static Zero() goes through it.
template <class T>
T zero_value() {
  if constexpr (requires { T::Zero(); })
    return T::Zero();
  else
    return T{};
}
}  // namespace detail

template <class T>
class Field2 {
 public:
  Field2() = default;
  Field2(int nu, int nv, double u0, double v0, double hu, double hv,
         const T& init = detail::zero_value<T>())
      : nu_(nu), nv_(nv), u0_(u0), v0_(v0), hu_(hu), hv_(hv),
        a_(static_cast<size_t>(nu + 1) * (nv + 1), init) {
    if (nu < 1 || nv < 1) throw error("Field2: need at least one cell per axis");
    if (!(hu > 0.0) || !(hv > 0.0)) throw error("Field2: spacings must be positive");
  }

  int nu() const { return nu_; }  // cell count along u (nodes: nu+1)
  int nv() const { return nv_; }
  double u0() const { return u0_; }
  double v0() const { return v0_; }
  double hu() const { return hu_; }
  double hv() const { return hv_; }
  double u(int i) const { return u0_ + i * hu_; }
  double v(int j) const { return v0_ + j * hv_; }

  const T& at(int i, int j) const { return a_[idx(i, j)]; }
  T& at(int i, int j) { return a_[idx(i, j)]; }

  /// Same grid geometry, value type possibly different.
  template <class S>
  Field2<S> like(const S& init = detail::zero_value<S>()) const {
    return Field2<S>(nu_, nv_, u0_, v0_, hu_, hv_, init);
  }

  template <class S>
  bool same_grid(const Field2<S>& o) const {
    return nu_ == o.nu() && nv_ == o.nv() && u0_ == o.u(0) && v0_ == o.v(0) &&
           hu_ == o.hu() && hv_ == o.hv();
  }

 private:
  size_t idx(int i, int j) const {
    return static_cast<size_t>(i) * (nv_ + 1) + j;
  }
  int nu_ = 0, nv_ = 0;
  double u0_ = 0, v0_ = 0, hu_ = 1, hv_ = 1;
  std::vector<T> a_;
};

using RealField = Field2<double>;
using ComplexField = Field2<Complex>;
using VecField = Field2<Vec3c>;
using MatField = Field2<Mat3c>;

/// d/du by second-order stencils: central in the interior, one-sided
/// (-3 f0 + 4 f1 - f2)/(2h) at the edges.
template <class T>
Field2<T> deriv_u(const Field2<T>& f) {
  Field2<T> g = f;
  const double h = f.hu();
  for (int j = 0; j <= f.nv(); ++j) {
    for (int i = 1; i < f.nu(); ++i)
      g.at(i, j) = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
    g.at(0, j) =
        (-3.0 * f.at(0, j) + 4.0 * f.at(1, j) - f.at(2, j)) / (2.0 * h);
    g.at(f.nu(), j) = (3.0 * f.at(f.nu(), j) - 4.0 * f.at(f.nu() - 1, j) +
                       f.at(f.nu() - 2, j)) /
                      (2.0 * h);
  }
  return g;
}

/// d/dv, same stencils along the other axis.
template <class T>
Field2<T> deriv_v(const Field2<T>& f) {
  Field2<T> g = f;
  const double h = f.hv();
  for (int i = 0; i <= f.nu(); ++i) {
    for (int j = 1; j < f.nv(); ++j)
      g.at(i, j) = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
    g.at(i, 0) =
        (-3.0 * f.at(i, 0) + 4.0 * f.at(i, 1) - f.at(i, 2)) / (2.0 * h);
    g.at(i, f.nv()) = (3.0 * f.at(i, f.nv()) - 4.0 * f.at(i, f.nv() - 1) +
                       f.at(i, f.nv() - 2)) /
                      (2.0 * h);
  }
  return g;
}

/// Centered mixed derivative d2/dudv on interior nodes (edges left at zero).
template <class T>
Field2<T> deriv_uv_interior(const Field2<T>& f) {
  Field2<T> g = f.template like<T>();
  const double d = 4.0 * f.hu() * f.hv();
  for (int i = 1; i < f.nu(); ++i)
    for (int j = 1; j < f.nv(); ++j)
      g.at(i, j) = (f.at(i + 1, j + 1) - f.at(i + 1, j - 1) -
                    f.at(i - 1, j + 1) + f.at(i - 1, j - 1)) /
                   d;
  return g;
}

/// Third derivative along u at node i (4-point stencils): central
/// (f_{i+2} - 2 f_{i+1} + 2 f_{i-1} - f_{i-2})/(2 h^3) two nodes in from the
/// edge, one-sided (-f_0 + 3 f_1 - 3 f_2 + f_3)/h^3 otherwise.
template <class T>
T third_deriv_u(const Field2<T>& f, int i, int j) {
  const double h3 = f.hu() * f.hu() * f.hu();
  const int n = f.nu();
  if (i >= 2 && i <= n - 2)
    return (f.at(i + 2, j) - 2.0 * f.at(i + 1, j) + 2.0 * f.at(i - 1, j) -
            f.at(i - 2, j)) /
           (2.0 * h3);
  if (i < 2)
    return (-f.at(i, j) + 3.0 * f.at(i + 1, j) - 3.0 * f.at(i + 2, j) +
            f.at(i + 3, j)) /
           h3;
  return (f.at(i, j) - 3.0 * f.at(i - 1, j) + 3.0 * f.at(i - 2, j) -
          f.at(i - 3, j)) /
         h3;
}

template <class T>
T third_deriv_v(const Field2<T>& f, int i, int j) {
  const double h3 = f.hv() * f.hv() * f.hv();
  const int n = f.nv();
  if (j >= 2 && j <= n - 2)
    return (f.at(i, j + 2) - 2.0 * f.at(i, j + 1) + 2.0 * f.at(i, j - 1) -
            f.at(i, j - 2)) /
           (2.0 * h3);
  if (j < 2)
    return (-f.at(i, j) + 3.0 * f.at(i, j + 1) - 3.0 * f.at(i, j + 2) +
            f.at(i, j + 3)) /
           h3;
  return (f.at(i, j) - 3.0 * f.at(i, j - 1) + 3.0 * f.at(i, j - 2) -
          f.at(i, j - 3)) /
         h3;
}

/// Max |value| over all nodes (double fields).
inline double field_max_abs(const RealField& f) {
  double m = 0.0;
  for (int i = 0; i <= f.nu(); ++i)
    for (int j = 0; j <= f.nv(); ++j) m = std::max(m, std::abs(f.at(i, j)));
  return m;
}

/// Max max-abs-entry over all nodes (matrix fields).
inline double field_max_abs(const MatField& f) {
  double m = 0.0;
  for (int i = 0; i <= f.nu(); ++i)
    for (int j = 0; j <= f.nv(); ++j) m = std::max(m, max_abs(f.at(i, j)));
  return m;
}

}  // namespace tlmls
