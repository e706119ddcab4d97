#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "zenotraj/errors.hpp"
#include "zenotraj/numerics/time_grid.hpp"

namespace zenotraj::numerics {

// Classical fixed-step RK4 for dM/dt = rhs(M). Returns M at every grid point;
// element 0 is the initial value.
template <class Rhs, class Matrix>
std::vector<Matrix> integrate_matrix_ode(Rhs&& rhs, const Matrix& initial, const TimeGrid& grid) {
  if (initial.rows() != initial.cols()) {
    throw DimensionError("integrate_matrix_ode: initial matrix is " +
                         std::to_string(initial.rows()) + "x" + std::to_string(initial.cols()));
  }
  const double h = grid.dt();
  std::vector<Matrix> out;
  out.reserve(grid.count());
  out.push_back(initial);

  Matrix current = initial;
  for (std::size_t k = 1; k < grid.count(); ++k) {
    const Matrix k1 = rhs(current);
    if (k1.rows() != current.rows() || k1.cols() != current.cols()) {
      throw DimensionError("integrate_matrix_ode: rhs changed the matrix shape");
    }
    const Matrix k2 = rhs(Matrix(current + (0.5 * h) * k1));
    const Matrix k3 = rhs(Matrix(current + (0.5 * h) * k2));
    const Matrix k4 = rhs(Matrix(current + h * k3));
    current += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back(current);
  }
  return out;
}

}  // namespace zenotraj::numerics
