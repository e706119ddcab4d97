#pragma once

// Second-order (Born) treatment of a qubit coupled to one bath per path
// through H_int = sum_a A_a (x) B_a. Bath correlations are given already
// resolved in frequency, C_ab(t1, t2) = \int J(w) f_ab(w, t1, t2) dw, so every
// quantity becomes an overlap of J with a filter built from time integrals.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zenotraj/errors.hpp"
#include "zenotraj/model/interferometer.hpp"
#include "zenotraj/model/qubit_state.hpp"
#include "zenotraj/model/spectral_density.hpp"
#include "zenotraj/numerics/quadrature.hpp"

namespace zenotraj::perturbation {

using model::cplx;
using model::Matrix2;
using model::QubitState;
using model::SpectralDensity;

// f_ab(w, t1, t2)
using CorrelationKernel = std::function<cplx(int a, int b, double w, double t1, double t2)>;

struct CouplingModel {
  Matrix2 h_q;
  std::vector<Matrix2> operators;           // A_a, Hermitian
  CorrelationKernel correlation;
  std::vector<SpectralDensity> densities;   // one per path, or a single shared one
  bool first_moments_vanish = true;

  const SpectralDensity& density(int path) const {
    if (densities.empty()) throw std::invalid_argument("CouplingModel: no spectral density");
    if (densities.size() == 1) return densities.front();
    if (path < 0 || static_cast<std::size_t>(path) >= densities.size()) {
      throw DimensionError("CouplingModel: no spectral density for path " + std::to_string(path));
    }
    return densities[static_cast<std::size_t>(path)];
  }

  void validate() const {
    if (model::hermiticity_defect(h_q) > 1e-12) throw std::invalid_argument("CouplingModel: H_Q must be Hermitian");
    if (operators.empty()) throw std::invalid_argument("CouplingModel: no coupling operators");
    for (const auto& a : operators) {
      if (model::hermiticity_defect(a) > 1e-12) {
        throw std::invalid_argument("CouplingModel: coupling operators must be Hermitian");
      }
    }
    if (!correlation) throw std::invalid_argument("CouplingModel: correlation kernel missing");
    if (!first_moments_vanish) {
      throw std::invalid_argument("CouplingModel: only baths with vanishing first moments are supported");
    }
  }
};

// sigma_+ (x) b + h.c. written as sigma_x (x) B_1 + sigma_y (x) B_2 at zero
// temperature, H_Q = wq sigma_z / 2.
inline CouplingModel dissipative_coupling(SpectralDensity j, double wq) {
  CouplingModel m;
  m.h_q = 0.5 * wq * model::sigma_z();
  m.operators = {model::sigma_x(), model::sigma_y()};
  m.correlation = [](int a, int b, double w, double t1, double t2) -> cplx {
    const cplx e = std::polar(0.25, -w * (t1 - t2));
    if (a == b) return e;
    return a == 0 ? cplx(0.0, -1.0) * e : cplx(0.0, 1.0) * e;
  };
  m.densities = {std::move(j)};
  return m;
}

// sigma_z (x) B at temperature T (T = 0 for vacuum).
inline CouplingModel dephasing_coupling(SpectralDensity j, double wq, double temperature = 0.0) {
  if (!(temperature >= 0.0)) throw std::invalid_argument("dephasing_coupling: temperature must be >= 0");
  CouplingModel m;
  m.h_q = 0.5 * wq * model::sigma_z();
  m.operators = {model::sigma_z()};
  m.correlation = [temperature](int, int, double w, double t1, double t2) -> cplx {
    const double tau = t1 - t2;
    const double thermal = temperature == 0.0 ? 1.0 : 1.0 / std::tanh(w / (2.0 * temperature));
    return {thermal * std::cos(w * tau), -std::sin(w * tau)};
  };
  m.densities = {std::move(j)};
  return m;
}

// exp(i H t) A exp(-i H t) for 2x2 Hermitian H, via H = h0 + h.sigma.
inline Matrix2 interaction_picture_operator(const Matrix2& a, const Matrix2& h, double t) {
  if (model::hermiticity_defect(h) > 1e-12) {
    throw std::invalid_argument("interaction_picture_operator: H must be Hermitian");
  }
  const double hx = 0.5 * (h(0, 1) + h(1, 0)).real();
  const double hy = 0.5 * (h(1, 0) - h(0, 1)).imag();
  const double hz = 0.5 * (h(0, 0) - h(1, 1)).real();
  const double norm = std::sqrt(hx * hx + hy * hy + hz * hz);
  if (norm == 0.0 || t == 0.0) return a;
  const Matrix2 axis = (hx * model::sigma_x() + hy * model::sigma_y() + hz * model::sigma_z()) / norm;
  // Global phase exp(-i h0 t) cancels between U^+ and U.
  const Matrix2 u = std::cos(norm * t) * Matrix2::Identity() - cplx(0.0, std::sin(norm * t)) * axis;
  return u.adjoint() * a * u;
}

namespace detail {

struct Node {
  double x;
  double w;
};

// Composite 10-point Gauss-Legendre rule on [a, b] with `panels` panels.
inline std::vector<Node> gauss_panels(double a, double b, std::size_t panels) {
  using rule = boost::math::quadrature::gauss<double, 10>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  std::vector<Node> out;
  out.reserve(panels * 10);
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double centre = a + (static_cast<double>(p) + 0.5) * width;
    const double half = 0.5 * width;
    for (std::size_t i = 0; i < x.size(); ++i) {
      out.push_back({centre - half * x[i], half * w[i]});
      out.push_back({centre + half * x[i], half * w[i]});
    }
  }
  return out;
}

// Largest rate in the time integrands: bath frequencies up to omega_max plus
// the Bohr frequency of H_Q.
inline std::size_t panel_count(const CouplingModel& m, double wmax, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix2> es(0.5 * (m.h_q + m.h_q.adjoint()), Eigen::EigenvaluesOnly);
  const double bohr = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
  const double phase = (std::abs(wmax) + bohr) * t;
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(phase / 2.0)) + 1);
}

// Sample points (t1, t2, weight) of the triangle 0 <= t2 <= t1 <= t.
struct TrianglePoint {
  double t1;
  double t2;
  double w;
};

inline std::vector<TrianglePoint> triangle_rule(double t, std::size_t panels) {
  std::vector<TrianglePoint> out;
  for (const auto& outer : gauss_panels(0.0, t, panels)) {
    const auto inner_panels =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(static_cast<double>(panels) * outer.x / t)));
    for (const auto& inner : gauss_panels(0.0, outer.x, inner_panels)) {
      out.push_back({outer.x, inner.x, outer.w * inner.w});
    }
  }
  return out;
}

}  // namespace detail

struct SecondOrderBlock {
  Matrix2 block;
  double trace_defect;   // |tr block|; zero for a trace-preserving correction
  double trace_norm;     // ||block||_1; validity of the expansion needs << 1
  bool small;            // trace_norm < 0.1
};

// rho_{Q,i,i,2}(t) = sum_ab \int_0^t dt1 \int_0^t1 dt2
//   [A_b(t2) rho0 A_a(t1) - A_a(t1) A_b(t2) rho0] C_ab(t1, t2) + h.c.
inline SecondOrderBlock second_order_block(const CouplingModel& m, const QubitState& rho0, int path, double t) {
  m.validate();
  if (!(t >= 0.0)) throw std::invalid_argument("second_order_block: t must be >= 0");
  const SpectralDensity& j = m.density(path);
  if (t == 0.0) return {Matrix2::Zero(), 0.0, 0.0, true};

  const double wmax = j.omega_max();
  const auto pts = detail::triangle_rule(t, detail::panel_count(m, wmax, t));
  const std::size_t na = m.operators.size();

  struct Term {
    std::size_t a, b;
    double t1, t2, w;
    Matrix2 x;
  };
  std::vector<Term> terms;
  terms.reserve(pts.size() * na * na);
  for (const auto& p : pts) {
    for (std::size_t a = 0; a < na; ++a) {
      const Matrix2 a1 = interaction_picture_operator(m.operators[a], m.h_q, p.t1);
      for (std::size_t b = 0; b < na; ++b) {
        const Matrix2 b2 = interaction_picture_operator(m.operators[b], m.h_q, p.t2);
        terms.push_back({a, b, p.t1, p.t2, p.w, b2 * rho0.rho * a1 - a1 * b2 * rho0.rho});
      }
    }
  }

  auto integrand = [&](double w) -> Eigen::Matrix<double, 2, 4> {
    Matrix2 acc = Matrix2::Zero();
    for (const auto& term : terms) {
      acc += (term.w * m.correlation(static_cast<int>(term.a), static_cast<int>(term.b), w, term.t1, term.t2)) *
             term.x;
    }
    acc *= j(w);
    Eigen::Matrix<double, 2, 4> packed;
    packed << acc.real(), acc.imag();
    return packed;
  };
  numerics::QuadratureOptions opts{1e-9, 1e-14, 4000};
  const auto res = numerics::integrate_adaptive(integrand, j.integration_points(0.0, wmax), opts);
  Matrix2 raw;
  raw.real() = res.value.leftCols<2>();
  raw.imag() = res.value.rightCols<2>();
  const Matrix2 block = raw + raw.adjoint();

  Eigen::SelfAdjointEigenSolver<Matrix2> es(0.5 * (block + block.adjoint()), Eigen::EigenvaluesOnly);
  const double tn = es.eigenvalues().cwiseAbs().sum();
  return {block, std::abs(block.trace()), tn, tn < 0.1};
}

// Off-diagonal path blocks vanish at second order when first bath moments do.
inline SecondOrderBlock second_order_block(const CouplingModel& m, const QubitState& rho0, int i, int j,
                                           double t) {
  if (i != j) {
    m.validate();
    return {Matrix2::Zero(), 0.0, 0.0, true};
  }
  return second_order_block(m, rho0, i, t);
}

namespace detail {

// 2N / sum_{k,l} exp(-i(phi_k - phi_l))
inline double phase_prefactor(const std::vector<double>& phases) {
  const double n = static_cast<double>(phases.size());
  if (phases.empty()) throw std::invalid_argument("general_filter: empty phase profile");
  for (double p : phases) {
    if (!std::isfinite(p)) throw std::invalid_argument("general_filter: non-finite phase");
  }
  const double s = model::phase_sum(phases);
  if (!(s > 1e-12 * n * n)) {
    throw NullOutcome("phase profile gives completely destructive interference (sum " + std::to_string(s) + ")");
  }
  return 2.0 * n / s;
}

inline Matrix2 orthogonal_projector(const QubitState& psi0) {
  if (!psi0.normalized) throw std::invalid_argument("general_filter: initial state must be a normalised pure state");
  const Matrix2& r = psi0.rho;
  if ((r * r - r).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("general_filter: initial state must be pure");
  }
  return Matrix2::Identity() - r;
}

// y_ab(t1, t2) = tr[P_perp A_b(t2) rho0 A_a(t1)] on the triangle rule.
struct FilterTerms {
  struct Term {
    int a, b;
    double t1, t2, w;
    cplx y;
  };
  std::vector<Term> terms;
};

inline FilterTerms filter_terms(const CouplingModel& m, const QubitState& psi0, double t, double wmax) {
  const Matrix2 perp = orthogonal_projector(psi0);
  FilterTerms out;
  if (t == 0.0) return out;
  const auto pts = triangle_rule(t, panel_count(m, wmax, t));
  const std::size_t na = m.operators.size();
  out.terms.reserve(pts.size() * na * na);
  for (const auto& p : pts) {
    for (std::size_t a = 0; a < na; ++a) {
      const Matrix2 a1 = interaction_picture_operator(m.operators[a], m.h_q, p.t1);
      for (std::size_t b = 0; b < na; ++b) {
        const Matrix2 b2 = interaction_picture_operator(m.operators[b], m.h_q, p.t2);
        out.terms.push_back({static_cast<int>(a), static_cast<int>(b), p.t1, p.t2, p.w,
                             (perp * b2 * psi0.rho * a1).trace()});
      }
    }
  }
  return out;
}

inline double filter_from_terms(const CouplingModel& m, const FilterTerms& ft, double w, double prefactor) {
  cplx acc = 0.0;
  for (const auto& term : ft.terms) acc += term.w * m.correlation(term.a, term.b, w, term.t1, term.t2) * term.y;
  return prefactor * acc.real();
}

}  // namespace detail

// F_i(w, t, N, phi) = (2N / sum_kl e^{-i(phi_k - phi_l)})
//   Re sum_ab \int\int f_ab(w, t1, t2) tr[P_perp A_b(t2) rho0 A_a(t1)].
// The filter depends on the path only through J_i, which does not enter here.
inline double general_filter(const CouplingModel& m, const QubitState& psi0, double w, double t,
                             const std::vector<double>& phases) {
  m.validate();
  if (!(t >= 0.0)) throw std::invalid_argument("general_filter: t must be >= 0");
  const double pref = detail::phase_prefactor(phases);
  const double wscale = std::max(std::abs(w), m.density(0).omega_max());
  const auto ft = detail::filter_terms(m, psi0, t, wscale);
  return detail::filter_from_terms(m, ft, w, pref);
}

inline std::vector<double> general_filter(const CouplingModel& m, const QubitState& psi0,
                                          const std::vector<double>& omegas, double t,
                                          const std::vector<double>& phases) {
  m.validate();
  if (!(t >= 0.0)) throw std::invalid_argument("general_filter: t must be >= 0");
  const double pref = detail::phase_prefactor(phases);
  double wscale = m.density(0).omega_max();
  for (double w : omegas) wscale = std::max(wscale, std::abs(w));
  const auto ft = detail::filter_terms(m, psi0, t, wscale);
  std::vector<double> out;
  out.reserve(omegas.size());
  for (double w : omegas) out.push_back(detail::filter_from_terms(m, ft, w, pref));
  return out;
}

// (1/N) sum_i \int_0^{omega_max,i} J_i(w) F_i(w) dw
inline double general_decay_factor(const CouplingModel& m, const QubitState& psi0, double t,
                                   const std::vector<double>& phases) {
  m.validate();
  if (!(t >= 0.0)) throw std::invalid_argument("general_decay_factor: t must be >= 0");
  const double pref = detail::phase_prefactor(phases);
  const int paths = static_cast<int>(phases.size());
  if (m.densities.size() != 1 && m.densities.size() != phases.size()) {
    throw DimensionError("general_decay_factor: " + std::to_string(m.densities.size()) +
                         " spectral densities for " + std::to_string(paths) + " paths");
  }
  if (t == 0.0) return 0.0;

  auto overlap = [&](const SpectralDensity& j) {
    const double wmax = j.omega_max();
    const auto ft = detail::filter_terms(m, psi0, t, wmax);
    auto integrand = [&](double w) {
      const double jw = j(w);
      return jw == 0.0 ? 0.0 : jw * detail::filter_from_terms(m, ft, w, pref);
    };
    return numerics::integrate_adaptive(integrand, j.integration_points(0.0, wmax), {1e-10, 1e-300, 4000}).value;
  };

  if (m.densities.size() == 1) return overlap(m.densities.front());
  double sum = 0.0;
  for (int i = 0; i < paths; ++i) sum += overlap(m.density(i));
  return sum / static_cast<double>(paths);
}

}  // namespace zenotraj::perturbation
