#pragma once

// Filter functions and overlap-integral decay factors gamma(t) = \int J F dw.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "zenotraj/dissipative.hpp"
#include "zenotraj/errors.hpp"
#include "zenotraj/model/interferometer.hpp"
#include "zenotraj/model/spectral_density.hpp"
#include "zenotraj/numerics/quadrature.hpp"
#include "zenotraj/numerics/sinc.hpp"
#include "zenotraj/numerics/time_grid.hpp"

namespace zenotraj::zeno_filter {

using model::SpectralDensity;
using numerics::sinc;

// N / (N - 2n)^2
inline double superposition_prefactor(int paths, int shifted) {
  model::check_paths(paths, shifted);
  if (model::is_null_configuration(paths, shifted)) {
    throw NullOutcome("n = N/2 yields a null result (completely destructive interference)");
  }
  const double d = static_cast<double>(paths - 2 * shifted);
  return static_cast<double>(paths) / (d * d);
}

inline double filter_diss(double w, double wq, double t, int paths, int shifted) {
  const double s = sinc(0.5 * (w - wq) * t);
  return superposition_prefactor(paths, shifted) * t * t * s * s;
}

// (1/2) N/(N-2n)^2 (1 - cos wt)/w^2, evaluated as t^2 sinc^2(wt/2)/2 inside.
inline double filter_deph(double w, double t, int paths, int shifted) {
  const double s = sinc(0.5 * w * t);
  return 0.5 * superposition_prefactor(paths, shifted) * 0.5 * t * t * s * s;
}

// Repeated-measurement comparison: (t^2/Nt) sinc^2[(w - wq) t / (2 Nt)].
inline double filter_traditional_zeno(double w, double wq, double t, double n_tilde) {
  if (!(n_tilde >= 1.0)) throw std::invalid_argument("filter_traditional_zeno: N~ must be >= 1");
  const double s = sinc(0.5 * (w - wq) * t / n_tilde);
  return t * t / n_tilde * s * s;
}

enum class FilterKind { diss_superposed, deph_superposed, diss_traditional_zeno };

struct FilterSpec {
  FilterKind kind = FilterKind::diss_superposed;
  int paths = 1;
  int shifted = 0;
  double n_tilde = 1.0;
  double t = 0.0;
  double wq = 1.0;

  static FilterSpec diss(int paths, int shifted, double t, double wq) {
    return checked({FilterKind::diss_superposed, paths, shifted, 1.0, t, wq});
  }
  static FilterSpec deph(int paths, int shifted, double t) {
    return checked({FilterKind::deph_superposed, paths, shifted, 1.0, t, 0.0});
  }
  static FilterSpec traditional(double n_tilde, double t, double wq) {
    return checked({FilterKind::diss_traditional_zeno, 1, 0, n_tilde, t, wq});
  }

  // Overall constant in front of the shape.
  double prefactor() const {
    switch (kind) {
      case FilterKind::diss_superposed: return superposition_prefactor(paths, shifted);
      case FilterKind::deph_superposed: return 0.5 * superposition_prefactor(paths, shifted);
      case FilterKind::diss_traditional_zeno: return 1.0 / n_tilde;
    }
    return 0.0;
  }

  // Filter divided by prefactor().
  double shape(double w) const {
    switch (kind) {
      case FilterKind::diss_superposed: {
        const double s = sinc(0.5 * (w - wq) * t);
        return t * t * s * s;
      }
      case FilterKind::deph_superposed: {
        const double s = sinc(0.5 * w * t);
        return 0.5 * t * t * s * s;
      }
      case FilterKind::diss_traditional_zeno: {
        const double s = sinc(0.5 * (w - wq) * t / n_tilde);
        return t * t * s * s;
      }
    }
    return 0.0;
  }

  double operator()(double w) const { return prefactor() * shape(w); }

  // Centre and sinc zeros; used to seed the quadrature partition.
  std::vector<double> features() const {
    const double centre = kind == FilterKind::deph_superposed ? 0.0 : wq;
    std::vector<double> out{centre};
    if (t > 0.0) {
      const double zero = 2.0 * std::numbers::pi * (kind == FilterKind::diss_traditional_zeno ? n_tilde : 1.0) / t;
      for (int k = 1; k <= 4; ++k) {
        out.push_back(centre - k * zero);
        out.push_back(centre + k * zero);
      }
    }
    return out;
  }

 private:
  static FilterSpec checked(FilterSpec s) {
    if (!(s.t >= 0.0) || !std::isfinite(s.t)) throw std::invalid_argument("FilterSpec: t must be >= 0");
    if (!std::isfinite(s.wq)) throw std::invalid_argument("FilterSpec: omega_q must be finite");
    if (s.kind == FilterKind::diss_traditional_zeno) {
      if (!(s.n_tilde >= 1.0)) throw std::invalid_argument("FilterSpec: N~ must be >= 1");
    } else {
      superposition_prefactor(s.paths, s.shifted);
    }
    return s;
  }
};

// gamma = prefactor * \int_0^{omega_max} J(w) shape(w) dw. Pulling the
// prefactor out makes the 1/N law of the superposed filter exact.
inline double decay_factor_overlap(const SpectralDensity& j, const FilterSpec& filter,
                                   const numerics::QuadratureOptions& opts = {1e-12, 1e-300, 20000}) {
  const double wmax = j.omega_max();
  std::vector<double> pts = j.integration_points(0.0, wmax);
  for (double f : filter.features()) {
    if (f > 0.0 && f < wmax) pts.push_back(f);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [wmax](double a, double b) { return b - a <= 1e-12 * wmax; }),
            pts.end());
  auto integrand = [&](double w) { return j(w) * filter.shape(w); };
  const double value = numerics::integrate_adaptive(integrand, pts, opts).value;
  return filter.prefactor() * std::max(0.0, value);
}

struct PerturbativeComparison {
  double gamma_exact;
  double gamma_overlap;

  double relative_mismatch() const {
    if (gamma_overlap == 0.0) return 0.0;
    return std::abs(gamma_exact - gamma_overlap) / gamma_overlap;
  }
};

// Exact -log p (Volterra solution with J -> eps^2 J) next to the overlap
// integral with the same scaled density. `dt` is the Volterra step.
inline PerturbativeComparison perturbative_consistency(const SpectralDensity& j, double wq, double t, int paths,
                                                       int shifted, double eps, double dt = 0.0) {
  if (!(t > 0.0)) throw std::invalid_argument("perturbative_consistency: t must be positive");
  if (!(eps >= 0.0)) throw std::invalid_argument("perturbative_consistency: coupling scale must be >= 0");
  const SpectralDensity scaled = j.scaled(eps * eps);
  const double step = dt > 0.0 ? dt : t / 1000.0;
  const auto grid = numerics::TimeGrid::spanning(t, step);
  const auto g = dissipative::decay_amplitude(scaled, wq, grid, dissipative::AmplitudeMethod::volterra);
  const double p = dissipative::survival_probability_diss(g[g.size() - 1], paths, shifted);
  const double exact = dissipative::decay_factor(p);
  const double overlap = decay_factor_overlap(scaled, FilterSpec::diss(paths, shifted, t, wq));
  return {exact, overlap};
}

// Full width at half maximum of a sampled curve, with linear interpolation at
// both half-maximum crossings.
inline double fwhm(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("fwhm: need >= 3 matching samples");
  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[peak];
  if (!(y[peak] > 0.0)) throw NumericError("fwhm: curve has no positive maximum");

  std::size_t l = peak;
  while (l > 0 && y[l - 1] >= half) --l;
  if (l == 0) throw NumericError("fwhm: no half-maximum crossing left of the peak");
  std::size_t r = peak;
  while (r + 1 < y.size() && y[r + 1] >= half) ++r;
  if (r + 1 == y.size()) throw NumericError("fwhm: no half-maximum crossing right of the peak");

  auto cross = [&](std::size_t below, std::size_t above) {
    return x[below] + (half - y[below]) * (x[above] - x[below]) / (y[above] - y[below]);
  };
  return cross(r + 1, r) - cross(l - 1, l);
}

}  // namespace zenotraj::zeno_filter
