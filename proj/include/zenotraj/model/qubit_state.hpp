#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include "zenotraj/errors.hpp"

namespace zenotraj::model {

using Matrix2 = Eigen::Matrix2cd;
using cplx = std::complex<double>;

// Basis ordering used throughout: index 0 = |e>, index 1 = |g>.
inline constexpr int kExcited = 0;
inline constexpr int kGround = 1;

inline Matrix2 sigma_x() { Matrix2 m; m << 0, 1, 1, 0; return m; }
inline Matrix2 sigma_y() { Matrix2 m; m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline Matrix2 sigma_z() { Matrix2 m; m << 1, 0, 0, -1; return m; }
// sigma_+ = |e><g|, sigma_- = |g><e|
inline Matrix2 sigma_plus() { Matrix2 m; m << 0, 1, 0, 0; return m; }
inline Matrix2 sigma_minus() { Matrix2 m; m << 0, 0, 1, 0; return m; }

// 2x2 density matrix, possibly unnormalised. For an unnormalised state the
// trace is the post-selection success probability.
struct QubitState {
  Matrix2 rho = Matrix2::Zero();
  bool normalized = false;

  static QubitState pure(cplx c_e, cplx c_g) {
    const double norm = std::norm(c_e) + std::norm(c_g);
    if (std::abs(norm - 1.0) > 1e-12) {
      throw std::invalid_argument("QubitState::pure: |c_e|^2 + |c_g|^2 = " + std::to_string(norm));
    }
    Eigen::Vector2cd psi(c_e, c_g);
    return {psi * psi.adjoint(), true};
  }
  static QubitState excited() { return pure(1.0, 0.0); }
  static QubitState ground() { return pure(0.0, 1.0); }
  // (|e> + sign |g>) / sqrt 2
  static QubitState plus(double sign = 1.0) {
    return pure(1.0 / std::sqrt(2.0), sign / std::sqrt(2.0));
  }

  double trace() const { return rho.trace().real(); }
  double population_excited() const { return rho(kExcited, kExcited).real(); }
  double population_ground() const { return rho(kGround, kGround).real(); }
  cplx coherence() const { return rho(kExcited, kGround); }
};

inline double hermiticity_defect(const Matrix2& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

inline double min_eigenvalue(const Matrix2& m) {
  const Matrix2 h = 0.5 * (m + m.adjoint());
  const double a = h(0, 0).real(), d = h(1, 1).real();
  const double b = std::abs(h(0, 1));
  return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + b * b);
}

struct StateCheck {
  bool hermitian;
  bool positive;
  bool trace_ok;
  double min_eigenvalue;
  double trace;
  bool ok() const noexcept { return hermitian && positive && trace_ok; }
};

inline StateCheck check_state(const QubitState& s, double psd_tol = 1e-12) {
  const double tr = s.trace();
  StateCheck c{};
  c.hermitian = hermiticity_defect(s.rho) <= 1e-12;
  c.min_eigenvalue = min_eigenvalue(s.rho);
  c.positive = c.min_eigenvalue >= -psd_tol;
  c.trace = tr;
  c.trace_ok = s.normalized ? std::abs(tr - 1.0) <= 1e-12 : (tr >= -1e-12 && tr <= 1.0 + 1e-12);
  return c;
}

// Trace distance (1/2)||a - b||_1 between 2x2 Hermitian matrices.
inline double trace_distance(const Matrix2& a, const Matrix2& b) {
  const Matrix2 d = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix2> solver(d, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

struct Normalized {
  QubitState state;
  double success_probability;
};

// Divides by the trace. Traces below 1e-14 count as completely destructive
// interference.
inline Normalized normalize(const QubitState& s) {
  const double tr = s.trace();
  if (tr < -1e-12) {
    throw std::invalid_argument("normalize: negative trace " + std::to_string(tr));
  }
  if (tr < 1e-14) {
    throw NullOutcome("post-selection probability " + std::to_string(tr) + " below 1e-14");
  }
  return {QubitState{s.rho / tr, true}, tr};
}

}  // namespace zenotraj::model
