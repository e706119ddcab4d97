#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "zenotraj/errors.hpp"
#include "zenotraj/model/interferometer.hpp"
#include "zenotraj/model/qubit_state.hpp"

namespace zenotraj::model {

// N x N array of 2x2 blocks rho_{Q,i,j}(t); block (j, i) is the adjoint of
// block (i, j).
class PathBlockMatrix {
 public:
  explicit PathBlockMatrix(int paths)
      : paths_(paths), blocks_(static_cast<std::size_t>(paths) * static_cast<std::size_t>(paths), Matrix2::Zero()) {
    if (paths < 1) throw std::invalid_argument("PathBlockMatrix: need at least one path");
  }

  // Identical single-path dynamics: diagonal blocks `single`, off-diagonal
  // blocks `cross` (and its adjoint below the diagonal).
  static PathBlockMatrix uniform(int paths, const Matrix2& single, const Matrix2& cross) {
    PathBlockMatrix m(paths);
    for (int i = 0; i < paths; ++i) {
      for (int j = 0; j < paths; ++j) {
        if (i == j) m.at(i, j) = single;
        else if (i < j) m.at(i, j) = cross;
        else m.at(i, j) = cross.adjoint();
      }
    }
    return m;
  }

  int paths() const noexcept { return paths_; }
  Matrix2& at(int i, int j) { return blocks_[index(i, j)]; }
  const Matrix2& at(int i, int j) const { return blocks_[index(i, j)]; }

  // Largest deviation from block(j, i) = block(i, j)^dagger.
  double adjoint_defect() const {
    double worst = 0.0;
    for (int i = 0; i < paths_; ++i) {
      for (int j = i; j < paths_; ++j) {
        worst = std::max(worst, (at(j, i) - at(i, j).adjoint()).cwiseAbs().maxCoeff());
      }
    }
    return worst;
  }

 private:
  std::size_t index(int i, int j) const {
    if (i < 0 || j < 0 || i >= paths_ || j >= paths_) {
      throw std::out_of_range("PathBlockMatrix: block index out of range");
    }
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(paths_) + static_cast<std::size_t>(j);
  }

  int paths_;
  std::vector<Matrix2> blocks_;
};

// (1/N^2) sum_{i,j} exp(-i(phi_i - phi_j)) rho_{Q,i,j}
inline QubitState postselect_general(const PathBlockMatrix& blocks, const std::vector<double>& phases) {
  const int n = blocks.paths();
  if (static_cast<int>(phases.size()) != n) {
    throw DimensionError("postselect_general: " + std::to_string(phases.size()) + " phases for " +
                         std::to_string(n) + " paths");
  }
  Matrix2 acc = Matrix2::Zero();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto w = std::polar(1.0, -(phases[static_cast<std::size_t>(i)] - phases[static_cast<std::size_t>(j)]));
      acc += w * blocks.at(i, j);
    }
  }
  const double nn = static_cast<double>(n);
  return {acc / (nn * nn), false};
}

// rho / N + (R_{N,n} - 1/N) beta for identical paths and binary phases.
inline QubitState superpose_identical(const QubitState& single, const Matrix2& cross,
                                      const InterferometerConfig& config) {
  const double n = static_cast<double>(config.paths());
  const double r = config.r();
  return {single.rho / n + (r - 1.0 / n) * cross, false};
}

}  // namespace zenotraj::model
