#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "zenotraj/numerics/time_grid.hpp"

namespace zenotraj::numerics {

// Solves c'(t) = -\int_0^t f(t - s) c(s) ds with c(0) = c0 on a uniform grid
// starting at 0.
//
// The memory integral I_k is discretised with the product trapezoidal rule and
// c is advanced with the trapezoidal rule on c' = -I. The unknown c_k enters
// I_k only through the end-point weight, so each step is an explicit division.
// Second order in dt; O(count^2) work with count kernel evaluations.
template <class Kernel>
ComplexSeries solve_volterra(Kernel&& kernel, const TimeGrid& grid, std::complex<double> c0) {
  if (grid.t0() != 0.0) {
    throw std::invalid_argument("solve_volterra: grid must start at t = 0");
  }
  using cplx = std::complex<double>;
  const std::size_t m = grid.count();
  const double h = grid.dt();

  std::vector<cplx> f(m);
  for (std::size_t k = 0; k < m; ++k) f[k] = kernel(grid.time(k));

  std::vector<cplx> c(m);
  c[0] = c0;
  cplx memory_prev = 0.0;  // I_0 = 0
  const cplx implicit = 1.0 + 0.25 * h * h * f[0];

  for (std::size_t k = 1; k < m; ++k) {
    // Known part of I_k: 0.5 f_k c_0 + sum_{j=1}^{k-1} f_{k-j} c_j.
    cplx known = 0.5 * f[k] * c[0];
    for (std::size_t j = 1; j < k; ++j) known += f[k - j] * c[j];
    known *= h;
    c[k] = (c[k - 1] - 0.5 * h * (memory_prev + known)) / implicit;
    memory_prev = known + 0.5 * h * f[0] * c[k];
  }
  return ComplexSeries(grid, std::move(c));
}

}  // namespace zenotraj::numerics
