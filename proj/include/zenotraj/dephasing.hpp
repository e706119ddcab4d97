#pragma once

// Pure dephasing of a qubit coupled through sigma_z to a thermal bosonic bath,
// under superposed paths. Single-path coherence decays as phi_T = exp(-Gamma_T);
// cross-path blocks carry sqrt(phi_T).

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zenotraj/errors.hpp"
#include "zenotraj/model/interferometer.hpp"
#include "zenotraj/model/qubit_state.hpp"
#include "zenotraj/model/spectral_density.hpp"
#include "zenotraj/numerics/quadrature.hpp"
#include "zenotraj/numerics/sinc.hpp"
#include "zenotraj/numerics/time_grid.hpp"

namespace zenotraj::dephasing {

using model::Matrix2;
using model::QubitState;
using model::SpectralDensity;
using numerics::TimeGrid;

struct DephasingParams {
  SpectralDensity j;
  double temperature = 0.0;  // k_B T in frequency units; 0 means vacuum
};

namespace detail {

inline double coth(double x) {
  if (x < 1e-6) return 1.0 / x + x / 3.0;
  if (x > 20.0) return 1.0;
  return 1.0 / std::tanh(x);
}

inline void check_infrared(const DephasingParams& p) {
  if (!(p.temperature >= 0.0) || !std::isfinite(p.temperature)) {
    throw std::invalid_argument("dephasing: temperature must be finite and >= 0");
  }
  if (p.temperature == 0.0) return;
  if (const auto* o = std::get_if<model::Ohmic>(&p.j.variant())) {
    if (o->ohmicity < 1.0) {
      throw DivergenceError("dephasing exponent: Ohmic s = " + std::to_string(o->ohmicity) +
                            " < 1 at T > 0 is treated as infrared divergent");
    }
    return;
  }
  if (p.j(0.0) > 0.0) {
    throw DivergenceError("dephasing exponent: J(0) > 0 at T > 0 makes the integral diverge logarithmically");
  }
}

}  // namespace detail

// Gamma_T(t) = 4 \int_0^{omega_max} J(w) w^-2 coth(w / 2T) (1 - cos wt) dw.
//
// 1 - cos wt is written as (wt)^2/2 sinc^2(wt/2), so the integrand is
// J(w) coth(w/2T) t^2 sinc^2(wt/2) / 2: no cancellation as w -> 0, and the
// sinc series branch supplies the small-w limit.
inline double dephasing_exponent(const DephasingParams& p, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("dephasing_exponent: t must be >= 0");
  detail::check_infrared(p);
  if (t == 0.0) return 0.0;
  const double temp = p.temperature;
  const SpectralDensity& j = p.j;
  auto integrand = [&j, temp, t](double w) {
    const double thermal = temp == 0.0 ? 1.0 : detail::coth(w / (2.0 * temp));
    const double s = numerics::sinc(0.5 * w * t);
    return j(w) * thermal * 0.5 * t * t * s * s;
  };
  const double wmax = j.omega_max();
  numerics::QuadratureOptions opts;
  opts.rel_tol = 1e-11;
  opts.abs_tol = 1e-15;
  opts.max_intervals = 4000 + static_cast<std::size_t>(8.0 * wmax * t);
  return 4.0 * numerics::integrate_adaptive(integrand, j.integration_points(0.0, wmax), opts).value;
}

inline double single_path_factor(double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("single_path_factor: exponent must be >= 0");
  return std::exp(-gamma);
}

// (N - 1) - (4n/N)(N - n), i.e. N R - 1.
inline double mixing_coefficient(int paths, int shifted) {
  model::check_paths(paths, shifted);
  const double nn = static_cast<double>(paths);
  const double k = static_cast<double>(shifted);
  return (nn - 1.0) - 4.0 * k * (nn - k) / nn;
}

// Coherence ratio of the normalised post-selected state.
inline double modified_dephasing(double phi, int paths, int shifted) {
  model::check_paths(paths, shifted);
  if (model::is_null_configuration(paths, shifted)) {
    throw NullOutcome("n = N/2 yields a null result (completely destructive interference)");
  }
  if (!(phi >= 0.0 && phi <= 1.0)) {
    throw std::invalid_argument("modified_dephasing: phi_T must lie in [0, 1], got " + std::to_string(phi));
  }
  const double c = mixing_coefficient(paths, shifted);
  const double root = std::sqrt(phi);
  const double den = 1.0 + c * root;
  if (!(den > 0.0)) {
    throw NumericError("modified_dephasing: non-physical denominator " + std::to_string(den));
  }
  return (phi + c * root) / den;
}

// rho(t)/N + (R - 1/N) sqrt(phi) rho0, with rho(t) = rho0 with coherences
// scaled by phi.
inline QubitState postselected_state_deph(const QubitState& rho0, double phi, int paths, int shifted) {
  if (!rho0.normalized || std::abs(rho0.trace() - 1.0) > 1e-12) {
    throw std::invalid_argument("postselected_state_deph: initial state must be normalised");
  }
  if (!(phi >= 0.0 && phi <= 1.0)) {
    throw std::invalid_argument("postselected_state_deph: phi_T must lie in [0, 1]");
  }
  const double r = model::r_factor(paths, shifted);
  const double inv_n = 1.0 / static_cast<double>(paths);
  Matrix2 single = rho0.rho;
  single(0, 1) *= phi;
  single(1, 0) *= phi;
  return {single * inv_n + (r - inv_n) * std::sqrt(phi) * rho0.rho, false};
}

inline double trace_distance_deph(double big_phi) { return std::abs(big_phi); }

struct DephasingFactors {
  TimeGrid grid;
  std::vector<double> gamma;
  std::vector<double> phi;
  std::vector<double> big_phi;
};

inline DephasingFactors dephasing_factors(const DephasingParams& p, const TimeGrid& grid, int paths,
                                          int shifted) {
  DephasingFactors out{grid, {}, {}, {}};
  out.gamma.reserve(grid.count());
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double g = dephasing_exponent(p, grid.time(k));
    const double ph = single_path_factor(g);
    out.gamma.push_back(g);
    out.phi.push_back(ph);
    out.big_phi.push_back(modified_dephasing(ph, paths, shifted));
  }
  return out;
}

// First time in (0, t_max] where Phi(t, N, n) changes sign, refined with
// TOMS 748 on the continuous exponent. Empty when no sign change is seen on a
// scan of `scan_points` samples.
inline std::optional<double> coherence_zero_time(const DephasingParams& p, int paths, int shifted,
                                                 double t_max, std::size_t scan_points = 400) {
  if (!(t_max > 0.0)) throw std::invalid_argument("coherence_zero_time: t_max must be positive");
  auto big_phi = [&](double t) {
    return modified_dephasing(single_path_factor(dephasing_exponent(p, t)), paths, shifted);
  };
  double prev_t = 0.0;
  double prev_v = big_phi(0.0);
  for (std::size_t k = 1; k <= scan_points; ++k) {
    const double t = t_max * static_cast<double>(k) / static_cast<double>(scan_points);
    const double v = big_phi(t);
    if (v == 0.0) return t;
    if ((prev_v > 0.0) != (v > 0.0)) {
      std::uintmax_t iters = 200;
      auto tol = boost::math::tools::eps_tolerance<double>(50);
      const auto [lo, hi] = boost::math::tools::toms748_solve(big_phi, prev_t, t, prev_v, v, tol, iters);
      return 0.5 * (lo + hi);
    }
    prev_t = t;
    prev_v = v;
  }
  return std::nullopt;
}

}  // namespace zenotraj::dephasing
