#pragma once

// Linear algebra over C^3 equipped with the indefinite Hermitian form of
// signature (2,1) whose coefficient matrix P has the anti-diagonal 2x2 block
// convention:
//
//   <z,w> = z1 conj(w2) + z2 conj(w1) - z3 conj(w3),
//
// conjugate-linear in the second slot.  The isometry group U(2,1) and its
// special subgroup are characterized through P, and small utilities (matrix
// exponential, form-based inverse) used by every other header live here.

#include <complex>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace tlmls {

using Complex = std::complex<double>;
using Vec3c = Eigen::Vector3cd;
using Mat3c = Eigen::Matrix3cd;

/// Error type thrown on precondition violations and solver failures.
struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Coefficient matrix of the Hermitian form: P^2 = id, P^T = P.
inline const Mat3c& form_P() {
  static const Mat3c P = [] {
    Mat3c M = Mat3c::Zero();
    M(0, 1) = 1.0;
    M(1, 0) = 1.0;
    M(2, 2) = -1.0;
    return M;
  }();
  return P;
}

/// <z,w> = z^T P conj(w); conjugate-linear in w.
inline Complex herm_form(const Vec3c& z, const Vec3c& w) {
  return z(0) * std::conj(w(1)) + z(1) * std::conj(w(0)) -
         z(2) * std::conj(w(2));
}

/// Real part of the form (the pseudo-Riemannian metric).
inline double metric_g(const Vec3c& z, const Vec3c& w) {
  return herm_form(z, w).real();
}

/// Imaginary part of the form (the symplectic structure).
inline double symplectic_omega(const Vec3c& z, const Vec3c& w) {
  return herm_form(z, w).imag();
}

/// Max-abs-entry norm; the project-wide matrix/vector norm.
template <class Derived>
inline double max_abs(const Eigen::MatrixBase<Derived>& M) {
  return M.cwiseAbs().maxCoeff();
}

/// ||P M^T P conj(M) - id||_max; zero exactly on U(2,1).
inline double u21_residual(const Mat3c& M) {
  const Mat3c& P = form_P();
  return max_abs(P * M.transpose() * P * M.conjugate() - Mat3c::Identity());
}

/// Membership test for the isometry group of the form.
inline bool is_u21(const Mat3c& M, double tol = 1e-9) {
  return u21_residual(M) <= tol;
}

/// U(2,1) membership plus det M = 1.
inline bool is_su21(const Mat3c& M, double tol = 1e-9) {
  return is_u21(M, tol) && std::abs(M.determinant() - Complex(1.0)) <= tol;
}

/// Matrix exponential (scaling-and-squaring Pade via Eigen).
inline Mat3c mat_exp(const Mat3c& X) { return X.exp(); }

/// Closed-form inverse P conj(M)^T P, valid on U(2,1) only.
inline Mat3c u21_inverse(const Mat3c& M, double tol = 1e-9) {
  double r = u21_residual(M);
  if (r > tol)
    throw error("u21_inverse: matrix is not in U(2,1), membership residual " +
                std::to_string(r));
  const Mat3c& P = form_P();
  return P * M.conjugate().transpose() * P;
}

/// Deterministic complex 3x3 sampler for property tests (entries in [-1,1]^2).
inline Mat3c random_mat3c(std::mt19937& gen) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Mat3c M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = Complex(d(gen), d(gen));
  return M;
}

/// Random element of the Lie algebra u(2,1): fixed points of X -> -P conj(X)^T P.
inline Mat3c random_u21_algebra(std::mt19937& gen) {
  Mat3c X = random_mat3c(gen);
  const Mat3c& P = form_P();
  return 0.5 * (X - P * X.conjugate().transpose() * P);
}

}  // namespace tlmls
