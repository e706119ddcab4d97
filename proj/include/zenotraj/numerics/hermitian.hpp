#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <string>

#include "zenotraj/errors.hpp"

namespace zenotraj::numerics {

// Smallest eigenvalue of a small Hermitian matrix (n <= 8).
//
// The input must be Hermitian to within 1e-12 relative to max(1, |M|); it is
// symmetrised before the self-adjoint solve.
inline double min_eigenvalue_hermitian(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError("min_eigenvalue_hermitian: square non-empty matrix required");
  }
  if (m.rows() > 8) {
    throw DimensionError("min_eigenvalue_hermitian: dimension " + std::to_string(m.rows()) +
                         " exceeds 8");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw std::invalid_argument("min_eigenvalue_hermitian: matrix is not Hermitian (deviation " +
                                std::to_string(asym) + ")");
  }
  const Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("min_eigenvalue_hermitian: eigen decomposition failed");
  }
  return solver.eigenvalues().minCoeff();
}

}  // namespace zenotraj::numerics
