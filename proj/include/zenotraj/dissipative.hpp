#pragma once

// Single-excitation dissipative spin-boson dynamics under superposed paths.
//
// One excitation shared between the qubit and a zero-temperature bosonic bath:
// the excited amplitude obeys c_e(t) = c_e(0) G(t) with G the solution of a
// memory-kernel Volterra equation. Everything observable after post-selection
// is a function of G(t), N and n.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
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
#include "zenotraj/numerics/hermitian.hpp"
#include "zenotraj/numerics/quadrature.hpp"
#include "zenotraj/numerics/time_grid.hpp"
#include "zenotraj/numerics/volterra.hpp"

namespace zenotraj::dissipative {

using model::cplx;
using model::Matrix2;
using model::QubitState;
using model::SpectralDensity;
using numerics::ComplexSeries;
using numerics::TimeGrid;

enum class KernelProvenance { numeric_from_density, lorentzian_closed };

struct MemoryKernel {
  std::function<cplx(double)> f;
  KernelProvenance provenance;

  cplx operator()(double t) const { return f(t); }
};

// f(t) = \int_0^{omega_max} J(w) exp(i (wq - w) t) dw, one adaptive quadrature
// per call.
inline MemoryKernel memory_kernel(const SpectralDensity& j, double wq) {
  if (!std::isfinite(wq)) throw std::invalid_argument("memory_kernel: omega_q must be finite");
  const double wmax = j.omega_max();
  auto points = j.integration_points(0.0, wmax);
  const double weight =
      numerics::integrate_adaptive([&j](double w) { return j(w); }, points, {1e-12, 1e-300, 4000}).value;
  if (weight == 0.0) {
    return {[](double) { return cplx(0.0, 0.0); }, KernelProvenance::numeric_from_density};
  }
  auto f = [j, wq, wmax, points = std::move(points), weight](double t) -> cplx {
    numerics::QuadratureOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-12 * weight;
    opts.max_intervals = 4000 + static_cast<std::size_t>(8.0 * wmax * std::abs(t));
    auto integrand = [&j, wq, t](double w) { return j(w) * std::polar(1.0, (wq - w) * t); };
    return numerics::integrate_adaptive(integrand, points, opts).value;
  };
  return {std::move(f), KernelProvenance::numeric_from_density};
}

// Full-line Lorentzian kernel (gamma0 lambda / 2) exp(-lambda |t|), resonant
// with the qubit.
inline MemoryKernel memory_kernel_lorentzian_closed(double gamma0, double width) {
  if (!(gamma0 > 0.0) || !(width > 0.0)) {
    throw std::invalid_argument("memory_kernel_lorentzian_closed: gamma0 and lambda must be positive");
  }
  return {[gamma0, width](double t) { return cplx(0.5 * gamma0 * width * std::exp(-width * std::abs(t)), 0.0); },
          KernelProvenance::lorentzian_closed};
}

// G(t) = exp(-lambda t/2) [cosh(delta t/2) + (lambda/delta) sinh(delta t/2)],
// delta = sqrt(lambda^2 - 2 gamma0 lambda). Real for every parameter choice;
// the oscillating branch (delta imaginary) becomes cos/sin.
inline cplx decay_amplitude_lorentzian_closed(double gamma0, double width, double t) {
  if (!(gamma0 > 0.0) || !(width > 0.0)) {
    throw std::invalid_argument("decay_amplitude_lorentzian_closed: gamma0 and lambda must be positive");
  }
  if (!(t >= 0.0)) throw std::invalid_argument("decay_amplitude_lorentzian_closed: t must be >= 0");
  const double lam = width;
  const double d2 = lam * lam - 2.0 * gamma0 * lam;
  const double x2 = 0.25 * d2 * t * t;  // (delta t / 2)^2, real
  const double damp = std::exp(-0.5 * lam * t);
  if (std::abs(x2) < 1e-6) {
    // cosh x + (lam t/2) sinh(x)/x, series in x^2
    const double ch = 1.0 + x2 / 2.0 + x2 * x2 / 24.0 + x2 * x2 * x2 / 720.0;
    const double sh = 1.0 + x2 / 6.0 + x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0;
    return {damp * (ch + 0.5 * lam * t * sh), 0.0};
  }
  if (d2 > 0.0) {
    // Overdamped: combine exponents before evaluating to avoid overflow.
    const double delta = std::sqrt(d2);
    const double a = 0.5 * (1.0 + lam / delta) * std::exp(0.5 * (delta - lam) * t);
    const double b = 0.5 * (1.0 - lam / delta) * std::exp(-0.5 * (delta + lam) * t);
    return {a + b, 0.0};
  }
  const double nu = std::sqrt(-d2);
  return {damp * (std::cos(0.5 * nu * t) + (lam / nu) * std::sin(0.5 * nu * t)), 0.0};
}

enum class AmplitudeSource { volterra, lorentzian_closed_form };

enum class AmplitudeMethod { automatic, volterra, closed_form };

struct DecayAmplitude {
  ComplexSeries series;
  AmplitudeSource source;

  std::size_t size() const noexcept { return series.size(); }
  const cplx& operator[](std::size_t k) const { return series[k]; }
  const TimeGrid& grid() const noexcept { return series.grid; }
};

namespace detail {

inline void check_contractive(const ComplexSeries& s) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!(std::abs(s[k]) <= 1.0 + 1e-9)) {
      throw NumericError("decay_amplitude: |G| = " + std::to_string(std::abs(s[k])) + " exceeds 1 at t = " +
                         std::to_string(s.grid.time(k)) + "; refine the time grid");
    }
  }
}

// Closed form applies to a resonant Lorentzian whose half-line truncation is
// negligible.
inline const model::Lorentzian* closed_form_candidate(const SpectralDensity& j, double wq) {
  const auto* lor = std::get_if<model::Lorentzian>(&j.variant());
  if (lor == nullptr) return nullptr;
  if (std::abs(lor->qubit_frequency - wq) > 1e-12 * std::max(1.0, std::abs(wq))) return nullptr;
  return lor;
}

}  // namespace detail

// G(t) on a grid starting at 0. `automatic` uses the Lorentzian closed form
// when lambda <= 0.02 wq (the half-line and full-line kernels then agree to
// better than 1e-3), the Volterra solver otherwise.
inline DecayAmplitude decay_amplitude(const SpectralDensity& j, double wq, const TimeGrid& grid,
                                      AmplitudeMethod method = AmplitudeMethod::automatic) {
  if (grid.t0() != 0.0) throw std::invalid_argument("decay_amplitude: grid must start at t = 0");
  const auto* lor = detail::closed_form_candidate(j, wq);
  bool closed = false;
  switch (method) {
    case AmplitudeMethod::automatic:
      closed = lor != nullptr && lor->width <= 0.02 * wq;
      break;
    case AmplitudeMethod::closed_form:
      if (lor == nullptr) {
        throw std::invalid_argument("decay_amplitude: closed form needs a Lorentzian centred on omega_q");
      }
      closed = true;
      break;
    case AmplitudeMethod::volterra:
      break;
  }
  if (closed) {
    std::vector<cplx> g(grid.count());
    for (std::size_t k = 0; k < g.size(); ++k) {
      g[k] = decay_amplitude_lorentzian_closed(lor->gamma0, lor->width, grid.time(k));
    }
    ComplexSeries s(grid, std::move(g));
    detail::check_contractive(s);
    return {std::move(s), AmplitudeSource::lorentzian_closed_form};
  }
  const MemoryKernel kernel = memory_kernel(j, wq);
  ComplexSeries s = numerics::solve_volterra(kernel, grid, cplx(1.0, 0.0));
  detail::check_contractive(s);
  return {std::move(s), AmplitudeSource::volterra};
}

// Unnormalised post-selected state for initial amplitudes (c_e0, c_g0).
inline QubitState postselected_state_diss(cplx c_e0, cplx c_g0, cplx g, int paths, int shifted) {
  const double norm = std::norm(c_e0) + std::norm(c_g0);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw std::invalid_argument("postselected_state_diss: |c_e|^2 + |c_g|^2 = " + std::to_string(norm));
  }
  const double r = model::r_factor(paths, shifted);
  const double g2 = std::norm(g);
  const double inv_n = 1.0 / static_cast<double>(paths);
  Matrix2 rho;
  rho(0, 0) = r * g2 * std::norm(c_e0);
  rho(0, 1) = r * g * c_e0 * std::conj(c_g0);
  rho(1, 0) = std::conj(rho(0, 1));
  rho(1, 1) = r * std::norm(c_g0) + inv_n * std::norm(c_e0) * (1.0 - g2);
  return {rho, false};
}

// Survival probability of |e> after post-selection.
inline double survival_probability_diss(cplx g, int paths, int shifted) {
  const double r = model::r_factor(paths, shifted);
  const double g2 = std::norm(g);
  const double kept = r * g2;
  const double total = kept + (1.0 - g2) / static_cast<double>(paths);
  if (!(total > 0.0) || !(kept > 0.0)) {
    throw NullOutcome("survival probability vanishes (N=" + std::to_string(paths) +
                      ", n=" + std::to_string(shifted) + ", |G|^2=" + std::to_string(g2) + ")");
  }
  return kept / total;
}

inline double decay_factor(double p) {
  if (!(p > 0.0)) throw NullOutcome("decay factor undefined for p = " + std::to_string(p));
  return 0.0 - std::log(p);  // +0 at p = 1
}

// Trace distance between the normalised post-selected images of |+> and |->:
//   2 (N-2n)^2 |G| / ([(N-2n)^2 - N] |G|^2 + (N-2n)^2 + N).
// The two states differ only in the sign of the coherence R G / 2, so the
// numerator is linear in |G| (N = 1 gives the familiar |G|).
inline double trace_distance_diss(cplx g, int paths, int shifted) {
  if (model::is_null_configuration(paths, shifted)) {
    model::check_paths(paths, shifted);
    throw NullOutcome("n = N/2 yields a null result (completely destructive interference)");
  }
  model::check_paths(paths, shifted);
  const double d = static_cast<double>(paths - 2 * shifted);
  const double d2 = d * d;
  const double nn = static_cast<double>(paths);
  const double g2 = std::norm(g);
  return 2.0 * d2 * std::abs(g) / ((d2 - nn) * g2 + d2 + nn);
}

inline std::vector<double> trace_distance_diss(const DecayAmplitude& g, int paths, int shifted) {
  std::vector<double> out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = trace_distance_diss(g[k], paths, shifted);
  return out;
}

// Choi matrix of the intermediate map from t to t + tau, built from
// r = G(t+tau)/G(t).
inline Eigen::Matrix4cd choi_intermediate_map(cplx g_t, cplx g_t_tau, int paths, int shifted) {
  if (model::is_null_configuration(paths, shifted)) {
    model::check_paths(paths, shifted);
    throw NullOutcome("n = N/2 yields a null result (completely destructive interference)");
  }
  model::check_paths(paths, shifted);
  if (std::abs(g_t) < 1e-14) {
    throw NumericError("choi_intermediate_map: |G(t)| below 1e-14, intermediate map undefined");
  }
  const double d = static_cast<double>(paths - 2 * shifted);
  const double nbar = static_cast<double>(paths) / (d * d);
  const cplx r = g_t_tau / g_t;
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = 1.0;
  m(0, 3) = std::conj(r);
  m(3, 0) = r;
  m(3, 3) = std::norm(r);
  m(1, 1) = nbar * (1.0 - std::norm(r));
  return m;
}

struct DivisibilityReport {
  bool divisible = true;                     // derivative criterion
  std::optional<double> first_violation_time;
  bool choi_divisible = true;                // Choi criterion on every defined pair
  std::size_t pairs = 0;
  std::size_t choi_undefined = 0;            // pairs with |G(t)| ~ 0
  std::size_t disagreements = 0;
  double tolerance = 0.0;

  bool criteria_agree() const noexcept { return disagreements == 0; }
};

// CP-divisibility of the post-selected map on the grid of `g`.
//
// Each consecutive pair (t_k, t_k+1) yields one difference quotient of |G|^2,
// centred at the pair midpoint; a rise above `tol` is a violation. The same
// pair is tested with the Choi matrix, whose (2,2) entry equals
// -Nbar dt (d|G|^2/dt) / |G(t_k)|^2, so the derivative tolerance maps to an
// eigenvalue tolerance of Nbar tol dt / |G(t_k)|^2.
inline DivisibilityReport is_cp_divisible(const DecayAmplitude& g, std::optional<double> tol = std::nullopt,
                                          int paths = 1, int shifted = 0) {
  if (g.size() < 3) throw std::invalid_argument("is_cp_divisible: need at least 3 samples");
  model::check_paths(paths, shifted);
  if (model::is_null_configuration(paths, shifted)) {
    throw NullOutcome("n = N/2 yields a null result (completely destructive interference)");
  }
  double gmax2 = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) gmax2 = std::max(gmax2, std::norm(g[k]));
  const double eps = tol ? *tol : 1e-9 * gmax2;
  const double dt = g.grid().dt();
  const double d = static_cast<double>(paths - 2 * shifted);
  const double nbar = static_cast<double>(paths) / (d * d);

  DivisibilityReport rep;
  rep.tolerance = eps;
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    ++rep.pairs;
    const double a2 = std::norm(g[k]);
    const double slope = (std::norm(g[k + 1]) - a2) / dt;
    const bool deriv_bad = slope > eps;
    if (deriv_bad) {
      if (rep.divisible) rep.first_violation_time = g.grid().time(k) + 0.5 * dt;
      rep.divisible = false;
    }
    if (std::abs(g[k]) < 1e-14) {
      ++rep.choi_undefined;
      continue;
    }
    const Eigen::MatrixXcd choi = choi_intermediate_map(g[k], g[k + 1], paths, shifted);
    const double lmin = numerics::min_eigenvalue_hermitian(choi);
    // Eigen-solver roundoff on the rank-one corner block is a few ulps of its norm.
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() *
                            (1.0 + std::norm(g[k + 1]) / a2 + nbar);
    const bool choi_bad = lmin < -(nbar * eps * dt / a2 + roundoff);
    if (choi_bad) rep.choi_divisible = false;
    if (choi_bad != deriv_bad) ++rep.disagreements;
  }
  return rep;
}

}  // namespace zenotraj::dissipative
