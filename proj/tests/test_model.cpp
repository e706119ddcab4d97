#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "zenotraj/errors.hpp"
#include "zenotraj/model/interferometer.hpp"
#include "zenotraj/model/postselect.hpp"
#include "zenotraj/model/qubit_state.hpp"
#include "zenotraj/model/spectral_density.hpp"

using namespace zenotraj;
using namespace zenotraj::model;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

QubitState random_pure() {
  std::normal_distribution<double> n01;
  auto& g = oracle::rng();
  cplx a(n01(g), n01(g)), b(n01(g), n01(g));
  const double nrm = std::sqrt(std::norm(a) + std::norm(b));
  return QubitState::pure(a / nrm, b / nrm);
}

}  // namespace

TEST_CASE("interference factor", "[interferometer]") {
  CHECK(r_factor(1, 0) == 1.0);
  CHECK_THAT(r_factor(3, 1), WithinAbs(1.0 / 9.0, 1e-16));
  CHECK(r_factor(4, 2) == 0.0);
  for (int n = 1; n <= 12; ++n)
    for (int k = 0; k <= n; ++k) {
      CHECK(r_factor(n, k) == r_factor(n, n - k));
      CHECK(r_factor(n, k) >= 0.0);
      CHECK(r_factor(n, k) <= 1.0);
    }
  CHECK_THROWS(r_factor(0, 0));
  CHECK_THROWS(r_factor(3, 4));
  CHECK_THROWS(r_factor(3, -1));
}

TEST_CASE("binary phase sums are exact squares", "[interferometer]") {
  for (int n = 1; n <= 10; ++n)
    for (int k = 0; k <= n; ++k) {
      const auto phases = InterferometerConfig::binary(n, k).phases();
      CHECK(phase_sum(phases) == static_cast<double>((n - 2 * k) * (n - 2 * k)));
    }
}

TEST_CASE("interferometer configuration modes", "[interferometer]") {
  const auto b = InterferometerConfig::binary(4, 2);
  CHECK(b.is_binary());
  CHECK(b.is_null());
  CHECK_FALSE(InterferometerConfig::binary(4, 1).is_null());
  const auto p = InterferometerConfig::with_phases({0.0, std::numbers::pi});
  CHECK_FALSE(p.is_binary());
  CHECK(p.is_null());
  CHECK_THROWS(p.shifted());
  CHECK_FALSE(InterferometerConfig::with_phases({0.0, 0.3, 1.1}).is_null());
  CHECK_THROWS(InterferometerConfig::with_phases({}));
  CHECK_THROWS(InterferometerConfig::with_phases({0.0, std::nan("")}));
}

TEST_CASE("post-selection of path blocks", "[postselect]") {
  const auto rho = random_pure();
  const Matrix2 beta = 0.7 * rho.rho;

  SECTION("single path returns its block") {
    PathBlockMatrix one(1);
    one.at(0, 0) = rho.rho;
    CHECK(postselect_general(one, {0.4}).rho == rho.rho);
  }
  SECTION("equal blocks with equal phases reproduce the block") {
    const auto m = PathBlockMatrix::uniform(5, rho.rho, rho.rho);
    CHECK((postselect_general(m, std::vector<double>(5, 0.0)).rho - rho.rho).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("two paths with opposite phase cancel") {
    const auto m = PathBlockMatrix::uniform(2, rho.rho, rho.rho);
    CHECK(postselect_general(m, {0.0, std::numbers::pi}).rho.cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("general and identical-path forms agree") {
    for (int n = 1; n <= 8; ++n)
      for (int k = 0; k <= n; ++k) {
        const auto cfg = InterferometerConfig::binary(n, k);
        const auto m = PathBlockMatrix::uniform(n, rho.rho, beta);
        const auto a = postselect_general(m, cfg.phases());
        const auto b = superpose_identical(rho, beta, cfg);
        CHECK((a.rho - b.rho).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(check_state(a, 1e-10).ok());
      }
  }
  SECTION("dimension mismatch") {
    CHECK_THROWS_AS(postselect_general(PathBlockMatrix(3), {0.0, 0.0}), DimensionError);
  }
}

TEST_CASE("identical-path superposition", "[postselect]") {
  const auto rho = random_pure();
  CHECK((superpose_identical(rho, rho.rho, InterferometerConfig::binary(1, 0)).rho - rho.rho).cwiseAbs().maxCoeff() <
        1e-15);
  CHECK(superpose_identical(rho, rho.rho, InterferometerConfig::binary(4, 2)).rho.cwiseAbs().maxCoeff() < 1e-15);
  const Matrix2 beta = 0.3 * rho.rho;
  CHECK((superpose_identical(rho, beta, InterferometerConfig::binary(6, 2)).rho -
         superpose_identical(rho, beta, InterferometerConfig::binary(6, 4)).rho)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  for (int n = 1; n <= 8; ++n)
    for (int k = 0; k <= n; ++k) {
      const auto s = superpose_identical(rho, rho.rho, InterferometerConfig::binary(n, k));
      CHECK_THAT(s.trace(), WithinAbs(r_factor(n, k), 1e-14));
    }
}

TEST_CASE("normalisation", "[state]") {
  QubitState s;
  s.rho << 0.5, 0.0, 0.0, 0.25;
  const auto n = normalize(s);
  CHECK_THAT(n.success_probability, WithinAbs(0.75, 1e-16));
  CHECK_THAT(n.state.rho(0, 0).real(), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(n.state.rho(1, 1).real(), WithinAbs(1.0 / 3.0, 1e-15));
  CHECK(n.state.normalized);

  CHECK_THROWS_AS(normalize(QubitState{}), NullOutcome);

  const auto p = random_pure();
  const auto again = normalize(p);
  CHECK_THAT(again.success_probability, WithinAbs(1.0, 1e-14));
  CHECK((again.state.rho - p.rho).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("state checks and trace distance", "[state]") {
  CHECK(check_state(QubitState::excited()).ok());
  CHECK(check_state(QubitState::plus(-1.0)).ok());
  QubitState bad;
  bad.rho << 1.2, 0.0, 0.0, -0.2;
  CHECK_FALSE(check_state(bad).ok());
  CHECK_THROWS(QubitState::pure(1.0, 1.0));
  CHECK_THAT(trace_distance(QubitState::excited().rho, QubitState::ground().rho), WithinAbs(1.0, 1e-15));
  CHECK_THAT(trace_distance(QubitState::plus().rho, QubitState::plus(-1.0).rho), WithinAbs(1.0, 1e-15));
  const auto a = random_pure(), b = random_pure();
  CHECK_THAT(trace_distance(a.rho, b.rho), WithinAbs(oracle::trace_distance2(a.rho, b.rho), 1e-14));
}

TEST_CASE("spectral density values", "[spectral]") {
  const auto lor = SpectralDensity::lorentzian(0.3, 0.05, 1.0);
  CHECK_THAT(lor(1.0), WithinRel(0.3 / (2.0 * std::numbers::pi), 1e-15));
  CHECK_THAT(lor.omega_max(), WithinRel(1.0 + 50 * 0.05, 1e-15));

  const auto ohm = SpectralDensity::ohmic(1.0 / 3.0, 1.0, 1.0);
  CHECK_THAT(ohm(1.0), WithinRel(std::exp(-1.0) / 3.0, 1e-15));
  CHECK_THAT(ohm.omega_max(), WithinRel(50.0, 1e-15));
  const auto ohm4 = SpectralDensity::ohmic(0.5, 4.0, 2.0);
  CHECK_THAT(ohm4(1.0), WithinRel(0.5 * std::pow(2.0, -3.0) * std::exp(-0.5), 1e-14));

  const auto gau = SpectralDensity::gaussian_peak(1.5, 0.2);
  CHECK(gau(1.5) == 1.0);
  CHECK_THAT(gau.omega_max(), WithinRel(1.5 + 12 * std::sqrt(0.2), 1e-15));

  const auto tab = SpectralDensity::tabulated({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0});
  CHECK_THAT(tab(0.5), WithinAbs(1.0, 1e-15));
  CHECK_THAT(tab(1.5), WithinAbs(1.0, 1e-15));

  const auto cut = SpectralDensity::gaussian_peak(1.5, 0.2, 2.0);
  CHECK(cut(2.5) == 0.0);
  CHECK_THROWS(gau(-1.0));
}

TEST_CASE("spectral density validation", "[spectral]") {
  CHECK_THROWS(SpectralDensity::lorentzian(-1.0, 0.1, 1.0));
  CHECK_THROWS(SpectralDensity::lorentzian(1.0, 0.0, 1.0));
  CHECK_THROWS(SpectralDensity::ohmic(1.0, 0.0, 1.0));
  CHECK_THROWS(SpectralDensity::ohmic(1.0, 1.0, -1.0));
  CHECK_THROWS(SpectralDensity::gaussian_peak(1.0, 0.0));
  CHECK_THROWS(SpectralDensity::tabulated({0.0, 0.0}, {1.0, 1.0}));
  CHECK_THROWS(SpectralDensity::tabulated({0.0, 1.0}, {1.0, -1.0}));
  CHECK_THROWS(SpectralDensity::tabulated({0.0, 1.0}, {1.0}));
  CHECK_THROWS(SpectralDensity::gaussian_peak(1.0, 0.1, 0.0));
}

TEST_CASE("scaling and integration partitions", "[spectral]") {
  const auto lor = SpectralDensity::lorentzian(0.3, 0.05, 1.0);
  const auto s = lor.scaled(0.25);
  for (double w : {0.0, 0.9, 1.0, 1.7}) CHECK_THAT(s(w), WithinRel(0.25 * lor(w), 1e-15));
  CHECK(s.omega_max() == lor.omega_max());

  const auto pts = lor.integration_points(0.0, lor.omega_max());
  CHECK(pts.front() == 0.0);
  CHECK(pts.back() == lor.omega_max());
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i] > pts[i - 1]);
  CHECK(std::find(pts.begin(), pts.end(), 1.0) != pts.end());
}
