#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace zenotraj::numerics {

// Uniform grid t_k = t0 + k*dt, k = 0..count-1.
class TimeGrid {
 public:
  TimeGrid(double t0, double dt, std::size_t count) : t0_(t0), dt_(dt), count_(count) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw std::invalid_argument("TimeGrid: dt must be positive and finite");
    }
    if (count < 2) {
      throw std::invalid_argument("TimeGrid: count must be at least 2");
    }
    if (!std::isfinite(t0)) {
      throw std::invalid_argument("TimeGrid: t0 must be finite");
    }
  }

  // Grid on [0, t_max] with a step no larger than dt_max.
  static TimeGrid spanning(double t_max, double dt_max) {
    if (!(t_max > 0.0) || !(dt_max > 0.0)) {
      throw std::invalid_argument("TimeGrid::spanning: t_max and dt_max must be positive");
    }
    const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt_max - 1e-9));
    const std::size_t n = steps < 1 ? 1 : steps;
    return TimeGrid(0.0, t_max / static_cast<double>(n), n + 1);
  }

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  std::size_t count() const noexcept { return count_; }
  double time(std::size_t k) const noexcept { return t0_ + dt_ * static_cast<double>(k); }
  double back() const noexcept { return time(count_ - 1); }

 private:
  double t0_;
  double dt_;
  std::size_t count_;
};

struct ComplexSeries {
  TimeGrid grid;
  std::vector<std::complex<double>> values;

  ComplexSeries(TimeGrid g, std::vector<std::complex<double>> v)
      : grid(g), values(std::move(v)) {
    if (values.size() != grid.count()) {
      throw std::invalid_argument("ComplexSeries: " + std::to_string(values.size()) +
                                  " values for a grid of " + std::to_string(grid.count()));
    }
  }

  std::size_t size() const noexcept { return values.size(); }
  const std::complex<double>& operator[](std::size_t k) const { return values[k]; }
};

}  // namespace zenotraj::numerics
