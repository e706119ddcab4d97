#pragma once

#include <stdexcept>
#include <string>

namespace zenotraj {

// Base for failures that originate in the numerics (exit code 3 in the CLI).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Post-selection with (numerically) zero success probability.
class NullOutcome : public NumericError {
 public:
  explicit NullOutcome(const std::string& what)
      : NumericError("null post-selection outcome: " + what) {}
};

// Adaptive quadrature ran out of subdivisions. Carries the best estimate
// available at that point together with its error bound.
class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, double estimate_re,
                  double estimate_im, double error_bound)
      : NumericError(what),
        estimate_re_(estimate_re),
        estimate_im_(estimate_im),
        error_bound_(error_bound) {}

  double estimate_real() const noexcept { return estimate_re_; }
  double estimate_imag() const noexcept { return estimate_im_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_re_;
  double estimate_im_;
  double error_bound_;
};

// Infrared-divergent bath integral.
class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid or incomplete run configuration (exit code 2 in the CLI).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace zenotraj
