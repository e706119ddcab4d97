#pragma once

// A single emitter whose position is coherently controlled over N sites.
// Vacuum-mediated decay correlates the sites through sinc(q d_ij); the joint
// control-qubit state follows a Lindblad-type master equation on 2N levels.

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zenotraj/errors.hpp"
#include "zenotraj/model/interferometer.hpp"
#include "zenotraj/numerics/rk4.hpp"
#include "zenotraj/numerics/sinc.hpp"
#include "zenotraj/numerics/time_grid.hpp"

namespace zenotraj::dicke {

using numerics::sinc;
using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

// x in [0, pi] with sinc(x) = s, for s in [0, 1].
inline double sinc_inverse(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("sinc_inverse: value must lie in [0, 1]");
  if (s == 1.0) return 0.0;
  if (s == 0.0) return std::numbers::pi;
  auto f = [s](double x) { return sinc(x) - s; };
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.0, std::numbers::pi, 1.0 - s, -s,
                                                           boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (lo + hi);
}

// Two-atom super- and subradiant rates Gamma0 [1 +/- sinc(qd)].
inline std::pair<double, double> dicke_rates_two_atom(double gamma0, double qd) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("dicke_rates_two_atom: Gamma0 must be positive");
  const double s = sinc(qd);
  return {gamma0 * (1.0 + s), gamma0 * (1.0 - s)};
}

class Geometry {
 public:
  static Geometry from_positions(std::vector<Vec3> positions, double q = 1.0) {
    if (positions.empty()) throw std::invalid_argument("Geometry: need at least one site");
    const std::size_t n = positions.size();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int c = 0; c < 3; ++c) {
          const double dx = positions[i][static_cast<std::size_t>(c)] - positions[j][static_cast<std::size_t>(c)];
          acc += dx * dx;
        }
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::sqrt(acc);
      }
    }
    return Geometry(std::move(d), q);
  }

  static Geometry from_distances(Eigen::MatrixXd d, double q = 1.0) { return Geometry(std::move(d), q); }

  // Segment, equilateral triangle or regular tetrahedron with edge d (N = 1..4).
  static Geometry equal_distance(int sites, double d, double q = 1.0) {
    if (!(d >= 0.0)) throw std::invalid_argument("Geometry: distance must be >= 0");
    const double h = std::sqrt(3.0) / 2.0;
    std::vector<Vec3> all{{0.0, 0.0, 0.0},
                          {d, 0.0, 0.0},
                          {0.5 * d, h * d, 0.0},
                          {0.5 * d, h * d / 3.0, d * std::sqrt(2.0 / 3.0)}};
    if (sites < 1 || sites > 4) {
      throw std::invalid_argument("Geometry: equal-distance layouts exist for N = 1..4, got " +
                                  std::to_string(sites));
    }
    all.resize(static_cast<std::size_t>(sites));
    return from_positions(std::move(all), q);
  }

  // Equal-distance layout whose pair factor sinc(q d) equals s (q = 1).
  static Geometry with_collective_factor(int sites, double s) {
    return equal_distance(sites, sinc_inverse(s), 1.0);
  }

  int sites() const noexcept { return static_cast<int>(d_.rows()); }
  double q() const noexcept { return q_; }
  const Eigen::MatrixXd& distances() const noexcept { return d_; }

 private:
  Geometry(Eigen::MatrixXd d, double q) : d_(std::move(d)), q_(q) {
    if (d_.rows() == 0 || d_.rows() != d_.cols()) throw DimensionError("Geometry: square distance matrix required");
    if (!(q >= 0.0) || !std::isfinite(q)) throw std::invalid_argument("Geometry: wavenumber must be >= 0");
    for (Eigen::Index i = 0; i < d_.rows(); ++i) {
      if (d_(i, i) != 0.0) throw std::invalid_argument("Geometry: d_ii must be 0");
      for (Eigen::Index j = 0; j < d_.cols(); ++j) {
        if (!(d_(i, j) >= 0.0) || d_(i, j) != d_(j, i)) {
          throw std::invalid_argument("Geometry: distances must be symmetric and >= 0");
        }
      }
    }
  }

  Eigen::MatrixXd d_;
  double q_;
};

// M_ii = 1, M_ij = sinc(q d_ij); the physical rates are Gamma0 M.
struct CollectiveRateMatrix {
  Eigen::MatrixXd m;
  double gamma0;

  static CollectiveRateMatrix from_geometry(const Geometry& g, double gamma0) {
    if (!(gamma0 > 0.0)) throw std::invalid_argument("CollectiveRateMatrix: Gamma0 must be positive");
    const auto n = static_cast<Eigen::Index>(g.sites());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = i == j ? 1.0 : sinc(g.q() * g.distances()(i, j));
    }
    return {std::move(m), gamma0};
  }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
};

// Basis |i> (x) |q>, flat index 2 i + q with q = 0 for |e>, 1 for |g>.
class MasterGenerator {
 public:
  using Matrix = Eigen::MatrixXcd;

  // drho/dt = Gamma0 sum_i (L_i rho L_i^+ - {L_i^+ L_i, rho}/2)
  //         + Gamma0 sum_{i != j} M_ij L_i rho L_j^+,   L_i = |i><i| (x) sigma_-.
  // The cross term is taken as written, without an anticommutator partner;
  // L_j^+ L_i = 0 for i != j keeps it trace-free, which is checked here.
  explicit MasterGenerator(const CollectiveRateMatrix& rates) : rates_(rates) {
    sites_ = static_cast<int>(rates.m.rows());
    const Eigen::Index dim = 2 * sites_;
    for (int i = 0; i < sites_; ++i) {
      Matrix l = Matrix::Zero(dim, dim);
      l(2 * i + 1, 2 * i) = 1.0;
      jumps_.push_back(std::move(l));
    }
    build_superoperator();
    const double defect = trace_defect();
    if (defect > 1e-12) {
      throw NumericError("MasterGenerator: generator is not trace preserving (defect " + std::to_string(defect) +
                         ")");
    }
  }

  static MasterGenerator build(const Geometry& geometry, double gamma0, int sites) {
    if (geometry.sites() != sites) {
      throw DimensionError("build_master_generator: geometry has " + std::to_string(geometry.sites()) +
                           " sites, N = " + std::to_string(sites));
    }
    return MasterGenerator(CollectiveRateMatrix::from_geometry(geometry, gamma0));
  }

  int sites() const noexcept { return sites_; }
  int dimension() const noexcept { return 2 * sites_; }
  const std::vector<Matrix>& jump_operators() const noexcept { return jumps_; }
  const Matrix& superoperator() const noexcept { return super_; }

  Matrix operator()(const Matrix& rho) const {
    const Eigen::Index dim = dimension();
    if (rho.rows() != dim || rho.cols() != dim) {
      throw DimensionError("MasterGenerator: state must be " + std::to_string(dim) + "x" + std::to_string(dim));
    }
    const Eigen::VectorXcd v = super_ * rho.reshaped();
    return v.reshaped(dim, dim);
  }

  // Term-by-term evaluation from the jump operators (reference for the
  // vectorised form).
  Matrix apply_direct(const Matrix& rho) const {
    const double g0 = rates_.gamma0;
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (int i = 0; i < sites_; ++i) {
      const Matrix& l = jumps_[static_cast<std::size_t>(i)];
      const Matrix ll = l.adjoint() * l;
      out += g0 * (l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll));
      for (int j = 0; j < sites_; ++j) {
        if (i == j) continue;
        out += g0 * rates_.m(i, j) * (l * rho * jumps_[static_cast<std::size_t>(j)].adjoint());
      }
    }
    return out;
  }

  // The same generator with the usual -(1/2){L_j^+ L_i, rho} partner added to
  // each cross term.
  Matrix apply_standard_form(const Matrix& rho) const {
    Matrix out = apply_direct(rho);
    for (int i = 0; i < sites_; ++i) {
      for (int j = 0; j < sites_; ++j) {
        if (i == j) continue;
        const Matrix lji = jumps_[static_cast<std::size_t>(j)].adjoint() * jumps_[static_cast<std::size_t>(i)];
        out -= 0.5 * rates_.gamma0 * rates_.m(i, j) * (lji * rho + rho * lji);
      }
    }
    return out;
  }

  // max |tr G(E_ab)| over matrix units E_ab.
  double trace_defect() const {
    const Eigen::Index dim = dimension();
    double worst = 0.0;
    for (Eigen::Index col = 0; col < super_.cols(); ++col) {
      cplx tr = 0.0;
      for (Eigen::Index a = 0; a < dim; ++a) tr += super_(a + a * dim, col);
      worst = std::max(worst, std::abs(tr));
    }
    return worst;
  }

 private:
  // vec(A rho B) = (B^T (x) A) vec(rho), column-major vec.
  static Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
      }
    }
    return out;
  }

  void build_superoperator() {
    const Eigen::Index dim = dimension();
    const Matrix id = Matrix::Identity(dim, dim);
    super_ = Matrix::Zero(dim * dim, dim * dim);
    const double g0 = rates_.gamma0;
    for (int i = 0; i < sites_; ++i) {
      const Matrix& l = jumps_[static_cast<std::size_t>(i)];
      const Matrix ll = l.adjoint() * l;
      super_ += g0 * kron(l.conjugate(), l);
      super_ -= 0.5 * g0 * (kron(id, ll) + kron(ll.transpose(), id));
      for (int j = 0; j < sites_; ++j) {
        if (i == j) continue;
        super_ += g0 * rates_.m(i, j) * kron(jumps_[static_cast<std::size_t>(j)].conjugate(), l);
      }
    }
  }

  CollectiveRateMatrix rates_;
  int sites_ = 0;
  std::vector<Matrix> jumps_;
  Matrix super_;
};

inline MasterGenerator build_master_generator(const Geometry& geometry, double gamma0, int sites) {
  return MasterGenerator::build(geometry, gamma0, sites);
}

// |chi><chi| (x) |e><e| with |chi> the uniform superposition of the N sites.
inline Eigen::MatrixXcd initial_state(int sites) {
  const Eigen::Index dim = 2 * sites;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  for (int i = 0; i < sites; ++i) psi(2 * i) = 1.0 / std::sqrt(static_cast<double>(sites));
  return psi * psi.adjoint();
}

inline std::vector<Eigen::MatrixXcd> evolve(const MasterGenerator& gen, const Eigen::MatrixXcd& rho0,
                                            const numerics::TimeGrid& grid) {
  return numerics::integrate_matrix_ode(gen, rho0, grid);
}

// <chi_phi| rho |chi_phi> as an (unnormalised) 2x2 qubit block, with
// |chi_phi> = N^{-1/2} sum_k exp(i phi_k) |k>.
inline Eigen::Matrix2cd postselect_control(const Eigen::MatrixXcd& rho, const std::vector<double>& phases) {
  const auto sites = static_cast<Eigen::Index>(phases.size());
  if (rho.rows() != 2 * sites || rho.cols() != 2 * sites) {
    throw DimensionError("postselect_control: state dimension does not match " + std::to_string(sites) +
                         " phases");
  }
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (Eigen::Index k = 0; k < sites; ++k) {
    for (Eigen::Index l = 0; l < sites; ++l) {
      const cplx w = std::polar(1.0, phases[static_cast<std::size_t>(l)] - phases[static_cast<std::size_t>(k)]);
      out += w * rho.block<2, 2>(2 * k, 2 * l);
    }
  }
  return out / static_cast<double>(sites);
}

inline double postselected_excited_population(const Eigen::MatrixXcd& rho, int sites, int shifted) {
  model::check_paths(sites, shifted);
  const auto block = postselect_control(rho, model::InterferometerConfig::binary(sites, shifted).phases());
  const double tr = block.trace().real();
  if (tr < 1e-14) {
    throw NullOutcome("post-selection probability " + std::to_string(tr) + " below 1e-14");
  }
  return block(0, 0).real() / tr;
}

inline std::vector<double> excited_population_numeric(const std::vector<Eigen::MatrixXcd>& series, int sites,
                                                      int shifted) {
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto& rho : series) out.push_back(postselected_excited_population(rho, sites, shifted));
  return out;
}

// Closed form for equal pair factors s.
inline double excited_population_analytic(double t, int sites, int shifted, double gamma0, double s) {
  model::check_paths(sites, shifted);
  if (!(t >= 0.0)) throw std::invalid_argument("excited_population_analytic: t must be >= 0");
  if (!(gamma0 > 0.0)) throw std::invalid_argument("excited_population_analytic: Gamma0 must be positive");
  const double r = model::r_factor(sites, shifted);
  const double inv_n = 1.0 / static_cast<double>(sites);
  const double decay = std::exp(-gamma0 * t);
  const double den = inv_n + (r - inv_n) * (decay + s * (1.0 - decay));
  if (!(den > 0.0)) {
    throw NullOutcome("excited population denominator " + std::to_string(den) + " is not positive");
  }
  return r * decay / den;
}

struct PopulationSeries {
  numerics::TimeGrid grid;
  std::vector<double> numeric;
  std::vector<double> analytic;
};

// Equal-distance layout with pair factor s, RK4 at dt = dt_scale / Gamma0.
inline PopulationSeries excited_population_equal_distance(int sites, int shifted, double gamma0, double s,
                                                          double t_max, double dt_scale = 1e-3) {
  const auto grid = numerics::TimeGrid::spanning(t_max, dt_scale / gamma0);
  const auto gen = build_master_generator(Geometry::with_collective_factor(sites, s), gamma0, sites);
  const auto rho = evolve(gen, initial_state(sites), grid);
  PopulationSeries out{grid, excited_population_numeric(rho, sites, shifted), {}};
  out.analytic.reserve(grid.count());
  for (std::size_t k = 0; k < grid.count(); ++k) {
    out.analytic.push_back(excited_population_analytic(grid.time(k), sites, shifted, gamma0, s));
  }
  return out;
}

}  // namespace zenotraj::dicke
