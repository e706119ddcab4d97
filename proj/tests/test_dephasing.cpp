#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "zenotraj/dephasing.hpp"

using namespace zenotraj;
using namespace zenotraj::dephasing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using model::QubitState;

namespace {

DephasingParams ohmic(double s, double temperature = 0.0) {
  return {SpectralDensity::ohmic(1.0 / 3.0, s, 1.0), temperature};
}

// 4 \int J/w^2 coth(w/2T) (1 - cos wt) dw by brute force, skipping w = 0 where
// the integrand has a finite limit.
double exponent_oracle(const DephasingParams& p, double t) {
  const double wmax = p.j.omega_max();
  auto f = [&](double w) {
    if (w == 0.0) return 0.0;
    const double th = p.temperature == 0.0 ? 1.0 : 1.0 / std::tanh(w / (2.0 * p.temperature));
    const double s = std::sin(0.5 * w * t);
    return 4.0 * p.j(w) / (w * w) * th * 2.0 * s * s;
  };
  return oracle::simpson(f, 0.0, wmax, 2'000'000);
}

}  // namespace

TEST_CASE("dephasing exponent", "[exponent]") {
  CHECK(dephasing_exponent(ohmic(1.0), 0.0) == 0.0);
  CHECK_THAT(dephasing_exponent(ohmic(1.0), 1.0), WithinAbs(2.0 / 3.0 * std::log(2.0), 1e-9));
  CHECK_THAT(dephasing_exponent(ohmic(1.0), 1.0), WithinAbs(0.462098, 1e-6));
  for (double t : {0.3, 2.0, 7.5}) {
    CHECK_THAT(dephasing_exponent(ohmic(1.0), t), WithinRel(exponent_oracle(ohmic(1.0), t), 1e-7));
    CHECK_THAT(dephasing_exponent(ohmic(4.0), t), WithinRel(exponent_oracle(ohmic(4.0), t), 1e-9));
    CHECK_THAT(dephasing_exponent(ohmic(3.0, 0.5), t), WithinRel(exponent_oracle(ohmic(3.0, 0.5), t), 1e-9));
  }
}

TEST_CASE("zero-temperature ohmic exponent has the log closed form", "[exponent]") {
  // Truncation at 50 w_c leaves e^-50 of the weight.
  for (double t : {0.5, 1.0, 4.0, 20.0}) {
    CHECK_THAT(dephasing_exponent(ohmic(1.0), t), WithinRel(2.0 / 3.0 * std::log(1.0 + t * t), 1e-9));
  }
}

TEST_CASE("super-ohmic exponent saturates", "[exponent]") {
  const double g50 = dephasing_exponent(ohmic(4.0), 50.0);
  const double g200 = dephasing_exponent(ohmic(4.0), 200.0);
  // 4 eta \int w^2 e^-w dw = 8 eta
  CHECK_THAT(g200, WithinRel(8.0 / 3.0, 1e-6));
  CHECK(std::abs(g200 - g50) < 1e-4);
  CHECK(single_path_factor(g200) > 0.0);
}

TEST_CASE("exponent grows with temperature", "[exponent]") {
  for (double t : {0.5, 2.0, 8.0}) {
    double prev = dephasing_exponent(ohmic(2.0, 0.0), t);
    for (double temp : {0.1, 0.5, 1.0, 3.0}) {
      const double g = dephasing_exponent(ohmic(2.0, temp), t);
      CHECK(g >= prev);
      prev = g;
    }
  }
}

TEST_CASE("infrared divergence is reported", "[exponent]") {
  CHECK_THROWS_AS(dephasing_exponent(ohmic(0.5, 0.1), 1.0), DivergenceError);
  CHECK_NOTHROW(dephasing_exponent(ohmic(0.5, 0.0), 1.0));
  CHECK_NOTHROW(dephasing_exponent(ohmic(1.0, 0.1), 1.0));
  CHECK_THROWS_AS(dephasing_exponent({SpectralDensity::gaussian_peak(0.0, 1.0), 0.2}, 1.0), DivergenceError);
  CHECK_THROWS(dephasing_exponent(ohmic(1.0, -1.0), 1.0));
  CHECK_THROWS(dephasing_exponent(ohmic(1.0), -1.0));
}

TEST_CASE("single-path factor", "[factor]") {
  CHECK(single_path_factor(0.0) == 1.0);
  CHECK_THAT(single_path_factor(std::log(4.0)), WithinAbs(0.25, 1e-15));
  CHECK_THAT(std::sqrt(single_path_factor(std::log(4.0))), WithinAbs(0.5, 1e-15));
  CHECK_THROWS(single_path_factor(-1.0));
}

TEST_CASE("modified dephasing function", "[factor]") {
  CHECK(mixing_coefficient(1, 0) == 0.0);
  CHECK_THAT(mixing_coefficient(3, 1), WithinAbs(-2.0 / 3.0, 1e-15));
  for (double phi : {0.01, 0.3, 0.9}) CHECK_THAT(modified_dephasing(phi, 1, 0), WithinAbs(phi, 1e-15));
  for (auto [n, k] : {std::pair{2, 0}, {3, 1}, {5, 2}, {8, 1}}) CHECK(modified_dephasing(1.0, n, k) == 1.0);
  CHECK_THAT(modified_dephasing(4.0 / 9.0, 3, 1), WithinAbs(0.0, 1e-15));
  CHECK(modified_dephasing(0.3, 3, 1) < 0.0);
  CHECK_THROWS_AS(modified_dephasing(0.5, 4, 2), NullOutcome);
  CHECK_THROWS(modified_dephasing(1.5, 3, 1));

  for (int n = 1; n <= 8; ++n)
    for (double phi = 0.01; phi <= 1.0; phi += 0.01) CHECK(modified_dephasing(phi, n, 0) >= phi - 1e-15);
}

TEST_CASE("post-selected dephased state", "[state]") {
  const auto plus = QubitState::plus();
  SECTION("phi = 1 returns R rho0") {
    const auto s = postselected_state_deph(plus, 1.0, 5, 1);
    CHECK((s.rho - model::r_factor(5, 1) * plus.rho).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("diagonal input stays diagonal") {
    QubitState d;
    d.rho << 0.3, 0.0, 0.0, 0.7;
    d.normalized = true;
    const auto s = postselected_state_deph(d, 0.2, 5, 1);
    CHECK(s.rho(0, 1) == model::cplx(0.0));
    // 1/N + (R - 1/N) sqrt(phi)
    CHECK_THAT(s.trace(), WithinAbs(0.2 + (0.36 - 0.2) * std::sqrt(0.2), 1e-15));
  }
  SECTION("normalised coherence is Phi") {
    const auto s = model::normalize(postselected_state_deph(plus, 0.25, 3, 0)).state;
    CHECK_THAT(s.coherence().real() / 0.5, WithinAbs(0.625, 1e-14));
    CHECK_THAT(modified_dephasing(0.25, 3, 0), WithinAbs(0.625, 1e-15));
    const auto z = model::normalize(postselected_state_deph(plus, 4.0 / 9.0, 3, 1)).state;
    CHECK(std::abs(z.coherence()) < 1e-15);
  }
  SECTION("populations are untouched and the state is PSD") {
    const auto psi = QubitState::pure(0.6, model::cplx(0.0, 0.8));
    for (int n = 1; n <= 8; ++n)
      for (int k = 0; 2 * k < n; ++k)
        for (double phi = 0.02; phi <= 1.0; phi += 0.07) {
          const auto raw = postselected_state_deph(psi, phi, n, k);
          CHECK(model::check_state(raw, 1e-10).ok());
          const auto s = model::normalize(raw).state;
          CHECK(s.population_excited() == Catch::Approx(0.36).epsilon(1e-14));
          CHECK(s.population_ground() == Catch::Approx(0.64).epsilon(1e-14));
          const double phi_big = modified_dephasing(phi, n, k);
          CHECK(std::abs(s.coherence() - phi_big * psi.coherence()) < 1e-14);
        }
  }
}

TEST_CASE("dephasing trace distance", "[trace-distance]") {
  CHECK(trace_distance_deph(1.0) == 1.0);
  CHECK(trace_distance_deph(0.0) == 0.0);
  CHECK(trace_distance_deph(-0.2) == 0.2);
  const auto a = model::normalize(postselected_state_deph(QubitState::plus(), 0.3, 3, 1)).state;
  const auto b = model::normalize(postselected_state_deph(QubitState::plus(-1.0), 0.3, 3, 1)).state;
  CHECK_THAT(oracle::trace_distance2(a.rho, b.rho), WithinAbs(trace_distance_deph(modified_dephasing(0.3, 3, 1)), 1e-14));
}

TEST_CASE("dephasing factor series", "[series]") {
  const auto grid = numerics::TimeGrid::spanning(5.0, 0.05);
  const auto f = dephasing_factors(ohmic(1.0), grid, 3, 1);
  CHECK(f.gamma[0] == 0.0);
  CHECK(f.phi[0] == 1.0);
  CHECK(f.big_phi[0] == 1.0);
  for (std::size_t k = 0; k < grid.count(); ++k) {
    CHECK_THAT(f.phi[k], WithinRel(std::exp(-f.gamma[k]), 1e-15));
    CHECK(f.phi[k] > 0.0);
    CHECK(f.phi[k] <= 1.0);
  }
}

TEST_CASE("sudden death of the modified coherence", "[zero]") {
  const auto root = coherence_zero_time(ohmic(1.0), 3, 1, 10.0);
  REQUIRE(root.has_value());
  // sqrt(phi) = 2/3  <=>  Gamma = 2 ln(3/2), and Gamma = (2/3) ln(1 + t^2)
  const double expect = std::sqrt(std::pow(1.5, 3.0) - 1.0);
  CHECK_THAT(*root, WithinRel(expect, 1e-6));
  const double by_condition = oracle::bisect(
      [](double t) { return std::sqrt(single_path_factor(dephasing_exponent(ohmic(1.0), t))) - 2.0 / 3.0; }, 0.5, 5.0);
  CHECK_THAT(*root, WithinRel(by_condition, 1e-6));
  CHECK_FALSE(coherence_zero_time(ohmic(1.0), 3, 0, 10.0).has_value());
}
