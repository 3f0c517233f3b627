#pragma once

// Order-6 and anti-linear automorphisms of sl(3,C) / SL(3,C), twisted loops of
// matrix Laurent polynomials, the six eigenspaces of the order-6 automorphism,
// and the five anti-linear reality conditions on twisted loops.
//
// Conventions: eps = exp(i pi/3) (primitive 6th root), delta = eps^2
// (primitive cube root).  The order-6 automorphism is built from
// P1 = diag(eps^2, eps^4, -1) * P, which satisfies P1^2 = id.

#include <array>
#include <limits>
#include <vector>

#include "tlmls/linalg.hpp"

namespace tlmls {

/// Primitive 6th root of unity used to twist loops.
inline Complex eps6() { return std::polar(1.0, M_PI / 3.0); }

/// Integer powers of eps6 evaluated exactly on the 6-cycle.
inline Complex eps6_pow(int n) {
  static const std::array<Complex, 6> table = [] {
    std::array<Complex, 6> t{};
    const double s = std::sqrt(3.0) / 2.0;
    t[0] = {1.0, 0.0};
    t[1] = {0.5, s};
    t[2] = {-0.5, s};
    t[3] = {-1.0, 0.0};
    t[4] = {-0.5, -s};
    t[5] = {0.5, -s};
    return t;
  }();
  return table[((n % 6) + 6) % 6];
}

/// The conjugating matrix of the order-6 automorphism; P1^2 = id.
inline const Mat3c& aut_P1() {
  static const Mat3c P1 = [] {
    Mat3c M = Mat3c::Zero();
    M(0, 1) = eps6_pow(2);
    M(1, 0) = eps6_pow(4);
    M(2, 2) = 1.0;
    return M;
  }();
  return P1;
}

/// diag(1,1,-1), used by two of the almost-compact reality conditions.
inline const Mat3c& form_I21() {
  static const Mat3c M = (Mat3c() << 1, 0, 0, 0, 1, 0, 0, 0, -1).finished();
  return M;
}

/// Order-6 automorphism on the algebra: X -> -P1 X^T P1.
inline Mat3c sigma_hat_alg(const Mat3c& X) {
  const Mat3c& P1 = aut_P1();
  return -P1 * X.transpose() * P1;
}

/// Order-6 automorphism on the group: g -> P1 (g^T)^{-1} P1.
inline Mat3c sigma_hat_grp(const Mat3c& g) {
  const Mat3c& P1 = aut_P1();
  return P1 * g.transpose().inverse() * P1;
}

/// Anti-linear involution on the algebra: X -> -P conj(X)^T P.
inline Mat3c tau_hat_alg(const Mat3c& X) {
  const Mat3c& P = form_P();
  return -P * X.conjugate().transpose() * P;
}

/// Anti-linear involution on the group: g -> P (conj(g)^T)^{-1} P.
inline Mat3c tau_hat_grp(const Mat3c& g) {
  const Mat3c& P = form_P();
  return P * g.conjugate().transpose().inverse() * P;
}

/// Matrix Laurent polynomial sum_k A_k lambda^k on a fixed degree window.
class LoopMatrix {
 public:
  LoopMatrix() : lo_(0), hi_(0), c_(1, Mat3c::Zero()) {}
  LoopMatrix(int lo, int hi) : lo_(lo), hi_(hi) {
    if (hi < lo) throw error("LoopMatrix: empty degree window");
    c_.assign(static_cast<size_t>(hi - lo + 1), Mat3c::Zero());
  }

  int lo() const { return lo_; }
  int hi() const { return hi_; }

  /// Coefficient of lambda^k; zero matrix outside the window.
  const Mat3c& coeff(int k) const {
    static const Mat3c zero = Mat3c::Zero();
    if (k < lo_ || k > hi_) return zero;
    return c_[static_cast<size_t>(k - lo_)];
  }

  /// Mutable coefficient access; the window must contain k.
  Mat3c& coeff(int k) {
    if (k < lo_ || k > hi_)
      throw error("LoopMatrix::coeff: degree outside window");
    return c_[static_cast<size_t>(k - lo_)];
  }

  /// Integer power by repeated multiplication (branch-free, exact for k = 0).
  static Complex ipow(Complex l, int k) {
    if (k == 0) return Complex(1.0);
    Complex base = k > 0 ? l : Complex(1.0) / l;
    Complex r(1.0);
    for (int n = std::abs(k); n > 0; --n) r *= base;
    return r;
  }

  /// Evaluate the polynomial at a nonzero spectral parameter.
  Mat3c eval(Complex lambda) const {
    if (lambda == Complex(0.0) && lo_ < 0)
      throw error("LoopMatrix::eval: lambda = 0 with negative degrees");
    Mat3c M = Mat3c::Zero();
    for (int k = lo_; k <= hi_; ++k) M += ipow(lambda, k) * coeff(k);
    return M;
  }

  /// Entry-wise max-abs distance between two loops (coefficient-wise).
  double dist(const LoopMatrix& o) const {
    int a = std::min(lo_, o.lo_), b = std::max(hi_, o.hi_);
    double m = 0.0;
    for (int k = a; k <= b; ++k)
      m = std::max(m, max_abs(Mat3c(coeff(k) - o.coeff(k))));
    return m;
  }

 private:
  int lo_, hi_;
  std::vector<Mat3c> c_;
};

/// The five anti-linear reality conditions on twisted loops.  Cases 1-3 pair
/// lambda with 1/conj(lambda) (almost compact), cases 4-5 pair lambda with
/// conj(lambda) (almost split).  Case 5 is the class realized by the surfaces
/// built in this project.
enum class RealFormId {
  AlmostCompact1 = 1,
  AlmostCompact2 = 2,
  AlmostCompact3 = 3,
  AlmostSplit4 = 4,
  AlmostSplit5 = 5,
};

/// Apply one of the five reality conditions to a loop, coefficient-wise.
inline LoopMatrix real_form_apply(RealFormId id, const LoopMatrix& g) {
  auto mirrored = [&](auto&& f) {
    LoopMatrix out(-g.hi(), -g.lo());
    for (int k = g.lo(); k <= g.hi(); ++k)
      out.coeff(-k) = f(Mat3c(g.coeff(k).conjugate()));
    return out;
  };
  auto in_place = [&](auto&& f) {
    LoopMatrix out(g.lo(), g.hi());
    for (int k = g.lo(); k <= g.hi(); ++k)
      out.coeff(k) = f(Mat3c(g.coeff(k).conjugate()));
    return out;
  };
  const Mat3c& P = form_P();
  const Mat3c& I21 = form_I21();
  switch (id) {
    case RealFormId::AlmostCompact1:
      return mirrored([](const Mat3c& C) { return Mat3c(-C.transpose()); });
    case RealFormId::AlmostCompact2: {
      Mat3c A = I21 * P;  // own inverse
      return mirrored([A](const Mat3c& C) { return Mat3c(A * C * A); });
    }
    case RealFormId::AlmostCompact3:
      return mirrored([&I21](const Mat3c& C) {
        return Mat3c(-I21 * C.transpose() * I21);
      });
    case RealFormId::AlmostSplit4:
      return in_place([](const Mat3c& C) { return C; });
    case RealFormId::AlmostSplit5:
      return in_place([&P](const Mat3c& C) {
        return Mat3c(-P * C.transpose() * P);
      });
  }
  throw error("real_form_apply: unknown case");
}

/// Projection of a traceless matrix onto the j-th eigenspace of the order-6
/// automorphism (eigenvalue eps^j), via the averaging formula
/// (1/6) sum_n eps^{-jn} sigma^n(X).
inline Mat3c eigenspace_project(const Mat3c& X, int j, double tol = 1e-9) {
  if (std::abs(X.trace()) > tol)
    throw error("eigenspace_project: input trace " +
                std::to_string(std::abs(X.trace())) + " exceeds tolerance");
  Mat3c acc = Mat3c::Zero();
  Mat3c Y = X;
  for (int n = 0; n < 6; ++n) {
    acc += eps6_pow(-j * n) * Y;
    Y = sigma_hat_alg(Y);
  }
  return acc / 6.0;
}

/// One eigenspace component of a traceless matrix.
struct EigenComponent {
  int index = 0;  // j in {0..5}; eigenvalue eps^j
  Mat3c part = Mat3c::Zero();
};

/// All six eigenspace components; they sum back to X.
inline std::array<EigenComponent, 6> eigenspace_split(const Mat3c& X,
                                                      double tol = 1e-9) {
  std::array<EigenComponent, 6> out;
  for (int j = 0; j < 6; ++j) out[j] = {j, eigenspace_project(X, j, tol)};
  return out;
}

/// Deviation of a loop from the sigma- and tau-twisting conditions
///   sigma: sigma(g(eps^{-1} lambda)) = g(lambda)
///   tau:   tau(g(conj(lambda)))      = g(lambda)
/// measured at 24 probe values: the 16th roots of unity and 8 reals in (0,2].
/// Algebra-valued loops use the linear involutions; group-valued loops use
/// the inverse-transpose versions.
struct TwistReport {
  double sigma_dev = 0.0;
  double tau_dev = 0.0;
  bool ok = false;
};

enum class LoopFlavor { Algebra, Group };

inline std::vector<Complex> twist_probe_lambdas() {
  std::vector<Complex> ls;
  for (int k = 0; k < 16; ++k)
    ls.push_back(std::polar(1.0, 2.0 * M_PI * k / 16.0));
  for (int k = 1; k <= 8; ++k) ls.push_back(Complex(0.25 * k, 0.0));
  return ls;
}

inline TwistReport twisted_loop_check(const LoopMatrix& g, double tol = 1e-12,
                                      LoopFlavor flavor = LoopFlavor::Algebra) {
  TwistReport rep;
  const Complex e = eps6();
  const bool grp = flavor == LoopFlavor::Group;
  for (const Complex& l : twist_probe_lambdas()) {
    Mat3c gl = g.eval(l);
    Mat3c gs = g.eval(l / e), gt = g.eval(std::conj(l));
    if (grp && (std::abs(gs.determinant()) < 1e-12 ||
                std::abs(gt.determinant()) < 1e-12)) {
      rep.sigma_dev = rep.tau_dev = std::numeric_limits<double>::infinity();
      break;
    }
    rep.sigma_dev = std::max(
        rep.sigma_dev,
        max_abs(Mat3c((grp ? sigma_hat_grp(gs) : sigma_hat_alg(gs)) - gl)));
    rep.tau_dev = std::max(
        rep.tau_dev,
        max_abs(Mat3c((grp ? tau_hat_grp(gt) : tau_hat_alg(gt)) - gl)));
  }
  rep.ok = rep.sigma_dev <= tol && rep.tau_dev <= tol;
  return rep;
}

/// Structural relations of the two automorphisms, sampled on random matrices:
/// sigma^6 = id, tau^2 = id, and sigma tau sigma = tau.
struct RelationReport {
  double sigma6_dev = 0.0;
  double tau2_dev = 0.0;
  double braid_dev = 0.0;
};

inline RelationReport relation_check(int n_samples = 100,
                                     unsigned seed = 20260822u) {
  RelationReport rep;
  std::mt19937 gen(seed);
  for (int s = 0; s < n_samples; ++s) {
    Mat3c X = random_mat3c(gen);
    Mat3c Y = X;
    for (int n = 0; n < 6; ++n) Y = sigma_hat_alg(Y);
    rep.sigma6_dev = std::max(rep.sigma6_dev, max_abs(Mat3c(Y - X)));
    rep.tau2_dev =
        std::max(rep.tau2_dev, max_abs(Mat3c(tau_hat_alg(tau_hat_alg(X)) - X)));
    rep.braid_dev = std::max(
        rep.braid_dev,
        max_abs(Mat3c(sigma_hat_alg(tau_hat_alg(sigma_hat_alg(X))) -
                      tau_hat_alg(X))));
  }
  return rep;
}

}  // namespace tlmls
