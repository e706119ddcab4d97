#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "zenotraj/dissipative.hpp"
#include "zenotraj/numerics/hermitian.hpp"

using namespace zenotraj;
using namespace zenotraj::dissipative;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using model::QubitState;

namespace {

// Explicit trace distance of the normalised post-selected images of |+>, |->.
double pm_distance(cplx g, int n, int k) {
  const double h = 1.0 / std::sqrt(2.0);
  const auto a = model::normalize(postselected_state_diss(h, h, g, n, k)).state;
  const auto b = model::normalize(postselected_state_diss(h, -h, g, n, k)).state;
  return oracle::trace_distance2(a.rho, b.rho);
}

}  // namespace

TEST_CASE("memory kernel at t = 0 is the total weight", "[kernel]") {
  const auto j = SpectralDensity::gaussian_peak(1.5, 0.2, 20.0);
  const auto k = memory_kernel(j, 1.0);
  CHECK(k.provenance == KernelProvenance::numeric_from_density);
  const double simpson = oracle::simpson([&](double w) { return j(w); }, 0.0, 20.0, 1'000'000);
  const cplx f0 = k.f(0.0);
  CHECK_THAT(f0.real(), WithinRel(simpson, 1e-10));
  CHECK_THAT(f0.real(), WithinAbs(std::sqrt(0.2 * std::numbers::pi), 1e-4));
  CHECK(std::abs(f0.imag()) < 1e-10);

  const auto lor = SpectralDensity::lorentzian(0.4, 0.2, 1.0);
  CHECK(std::abs(memory_kernel(lor, 1.0).f(0.0).imag()) < 1e-10);
}

TEST_CASE("lorentzian kernel against the pole oracle and a brute-force sum", "[kernel]") {
  const auto j = SpectralDensity::lorentzian(1.0, 0.1, 1.0);
  const double t = 5.0;
  const cplx f = memory_kernel(j, 1.0).f(t);
  const double pole = 0.05 * std::exp(-0.5);
  const double dev = std::abs(f - pole) / pole;
  INFO("half-line truncation deviation from the full-line pole value: " << dev);
  CHECK(dev < 0.02);

  const double re = oracle::simpson([&](double w) { return j(w) * std::cos((1.0 - w) * t); }, 0.0, j.omega_max(),
                                    2'000'000);
  const double im = oracle::simpson([&](double w) { return j(w) * std::sin((1.0 - w) * t); }, 0.0, j.omega_max(),
                                    2'000'000);
  CHECK_THAT(f.real(), WithinAbs(re, 1e-10));
  CHECK_THAT(f.imag(), WithinAbs(im, 1e-10));
  CHECK_THAT(f.real(), WithinAbs(0.03004076, 1e-7));
}

TEST_CASE("closed-form lorentzian kernel", "[kernel]") {
  const auto k = memory_kernel_lorentzian_closed(0.3, 0.7);
  CHECK(k.provenance == KernelProvenance::lorentzian_closed);
  CHECK_THAT(k.f(2.0).real(), WithinRel(0.5 * 0.3 * 0.7 * std::exp(-1.4), 1e-14));
}

TEST_CASE("closed-form decay amplitude", "[amplitude]") {
  CHECK(decay_amplitude_lorentzian_closed(0.5, 2.0, 0.0) == cplx(1.0));
  CHECK_THAT(decay_amplitude_lorentzian_closed(1.0, 1.0, std::numbers::pi).real(),
             WithinAbs(std::exp(-0.5 * std::numbers::pi), 1e-14));
  for (double t : {0.1, 1.0, 7.0}) {
    CHECK_THAT(decay_amplitude_lorentzian_closed(1.0, 1.0, t).real(), WithinAbs(oracle::lorentzian_unit(t), 1e-14));
  }

  SECTION("critical damping limit") {
    const double lam = 2.0, g0 = 1.0;
    for (double t : {0.0, 0.5, 3.0, 20.0}) {
      const double crit = std::exp(-0.5 * lam * t) * (1.0 + 0.5 * lam * t);
      CHECK_THAT(decay_amplitude_lorentzian_closed(g0, lam, t).real(), WithinAbs(crit, 1e-14));
      CHECK_THAT(decay_amplitude_lorentzian_closed(g0 * (1 + 1e-9), lam, t).real(), WithinAbs(crit, 1e-8));
      CHECK_THAT(decay_amplitude_lorentzian_closed(g0 * (1 - 1e-9), lam, t).real(), WithinAbs(crit, 1e-8));
    }
  }
  SECTION("overdamped branch stays finite at long times") {
    const cplx g = decay_amplitude_lorentzian_closed(1e-3, 4e3, 1e6);
    CHECK(std::isfinite(g.real()));
    CHECK(g.real() > 0.0);
    CHECK(g.real() < 1.0);
  }
}

TEST_CASE("volterra amplitude against the closed form", "[amplitude]") {
  const auto grid = numerics::TimeGrid::spanning(std::numbers::pi, 1e-3);
  const auto k = memory_kernel_lorentzian_closed(1.0, 1.0);
  const auto s = numerics::solve_volterra(k.f, grid, cplx(1.0));
  CHECK_THAT(s[s.size() - 1].real(), WithinAbs(0.207880, 1e-5));
  CHECK_THAT(s[s.size() - 1].real(),
             WithinAbs(decay_amplitude_lorentzian_closed(1.0, 1.0, std::numbers::pi).real(), 1e-5));
}

TEST_CASE("decay amplitude dispatch and trivial cases", "[amplitude]") {
  const auto grid = numerics::TimeGrid::spanning(5.0, 0.01);

  const auto zero = decay_amplitude(SpectralDensity::zero(), 1.0, grid);
  for (std::size_t k = 0; k < zero.size(); ++k) CHECK(zero[k] == cplx(1.0));

  const auto narrow = SpectralDensity::lorentzian(0.01, 0.01, 1.0);
  CHECK(decay_amplitude(narrow, 1.0, grid).source == AmplitudeSource::lorentzian_closed_form);
  CHECK(decay_amplitude(narrow, 1.0, grid, AmplitudeMethod::volterra).source == AmplitudeSource::volterra);
  const auto wide = SpectralDensity::lorentzian(0.1, 0.2, 1.0);
  CHECK(decay_amplitude(wide, 1.0, grid).source == AmplitudeSource::volterra);
  CHECK_THROWS(decay_amplitude(SpectralDensity::gaussian_peak(1.5, 0.2), 1.0, grid, AmplitudeMethod::closed_form));
  CHECK_THROWS(decay_amplitude(narrow, 1.0, numerics::TimeGrid(1.0, 0.1, 5)));
}

TEST_CASE("half-line and full-line kernels agree for a narrow lorentzian", "[amplitude]") {
  const double wq = 1.0, lam = 0.02, g0 = 0.02;
  const auto j = SpectralDensity::lorentzian(g0, lam, wq);
  const auto grid = numerics::TimeGrid::spanning(150.0, 0.05);
  const auto num = decay_amplitude(j, wq, grid, AmplitudeMethod::volterra);
  const auto cf = decay_amplitude(j, wq, grid, AmplitudeMethod::closed_form);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.count(); ++k) worst = std::max(worst, std::abs(num[k] - cf[k]));
  INFO("max |G_volterra - G_closed| = " << worst);
  CHECK(worst < 1e-2);
}

TEST_CASE("amplitude is contractive and starts at one", "[amplitude]") {
  const auto grid = numerics::TimeGrid::spanning(20.0, 0.01);
  for (const auto& j : {SpectralDensity::gaussian_peak(1.5, 0.2), SpectralDensity::lorentzian(0.3, 0.5, 1.0),
                        SpectralDensity::ohmic(0.05, 1.0, 2.0)}) {
    const auto g = decay_amplitude(j, 1.0, grid);
    CHECK(g[0] == cplx(1.0));
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(g[k]) <= 1.0 + 1e-9);
  }
}

TEST_CASE("overdamped lorentzian decays monotonically", "[amplitude]") {
  const auto grid = numerics::TimeGrid::spanning(40.0, 0.01);
  const auto g = decay_amplitude(SpectralDensity::lorentzian(0.25, 1.0, 1.0), 1.0, grid, AmplitudeMethod::closed_form);
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(std::norm(g[k]) <= std::norm(g[k - 1]) + 1e-15);
}

TEST_CASE("post-selected dissipative state", "[state]") {
  SECTION("t = 0 reproduces the initial state up to R") {
    const cplx ce(0.6, 0.0), cg(0.0, 0.8);
    for (auto [n, k] : {std::pair{1, 0}, {3, 1}, {5, 0}, {6, 1}}) {
      const auto s = postselected_state_diss(ce, cg, 1.0, n, k);
      const auto psi = QubitState::pure(ce, cg);
      CHECK((s.rho - model::r_factor(n, k) * psi.rho).cwiseAbs().maxCoeff() < 1e-15);
      CHECK((model::normalize(s).state.rho - psi.rho).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
  SECTION("complete decay") {
    const auto s = postselected_state_diss(1.0, 0.0, 0.0, 3, 0);
    CHECK(s.rho(0, 0) == cplx(0.0));
    CHECK_THAT(s.rho(1, 1).real(), WithinAbs(1.0 / 3.0, 1e-16));
    CHECK_THAT(model::normalize(s).state.population_ground(), WithinAbs(1.0, 1e-15));
  }
  SECTION("near-frozen population at large N") {
    const cplx g(std::sqrt(0.5), 0.0);
    const auto s = model::normalize(postselected_state_diss(1.0, 0.0, g, 10000, 1)).state;
    const double r = model::r_factor(10000, 1);
    const double expect = r * 0.5 / (r * 0.5 + 0.5 / 10000.0);
    CHECK_THAT(s.population_excited(), WithinAbs(expect, 1e-14));
    CHECK_THAT(s.population_excited(), WithinAbs(0.99990, 5e-6));
  }
  CHECK_THROWS(postselected_state_diss(1.0, 1.0, 0.5, 3, 1));
}

TEST_CASE("survival probability and decay factor", "[survival]") {
  CHECK(survival_probability_diss(1.0, 4, 1) == 1.0);
  CHECK(decay_factor(1.0) == 0.0);
  CHECK_THAT(survival_probability_diss(cplx(0.3, 0.4), 1, 0), WithinAbs(0.25, 1e-15));
  const cplx g(std::sqrt(0.99), 0.0);
  const double p = survival_probability_diss(g, 4, 0);
  CHECK_THAT(p, WithinAbs(0.997481, 1e-6));
  CHECK_THAT(p, WithinRel(model::normalize(postselected_state_diss(1.0, 0.0, g, 4, 0)).state.population_excited(), 1e-14));
  CHECK_THROWS_AS(survival_probability_diss(0.0, 3, 0), NullOutcome);
  CHECK_THROWS_AS(survival_probability_diss(0.5, 4, 2), NullOutcome);
  CHECK_THROWS_AS(decay_factor(0.0), NullOutcome);
}

TEST_CASE("trace distance of the |+>, |-> pair", "[trace-distance]") {
  CHECK_THAT(trace_distance_diss(cplx(0.6, 0.0), 1, 0), WithinAbs(0.6, 1e-15));
  CHECK_THAT(trace_distance_diss(1.0, 5, 1), WithinAbs(1.0, 1e-15));
  const cplx g(std::sqrt(0.5), 0.0);
  CHECK_THAT(trace_distance_diss(g, 3, 1), WithinAbs(2.0 * std::sqrt(0.5) / 3.0, 1e-15));
  CHECK_THAT(trace_distance_diss(g, 3, 1), WithinAbs(pm_distance(g, 3, 1), 1e-14));
  CHECK_THROWS_AS(trace_distance_diss(g, 4, 2), NullOutcome);

  std::uniform_real_distribution<double> u(1e-3, 1.0), ph(0.0, 2 * std::numbers::pi);
  auto& gen = oracle::rng();
  for (int n = 1; n <= 6; ++n)
    for (int k = 0; 2 * k < n; ++k)
      for (int trial = 0; trial < 10; ++trial) {
        const cplx gg = std::polar(u(gen), ph(gen));
        CHECK_THAT(trace_distance_diss(gg, n, k), WithinAbs(pm_distance(gg, n, k), 1e-8));
      }
}

TEST_CASE("trace distance is monotone exactly when |G|^2 is", "[trace-distance]") {
  const auto grid = numerics::TimeGrid::spanning(3000.0, 5.0);
  const auto g = decay_amplitude(SpectralDensity::lorentzian(1e-3, 1e-4, 1.0), 1.0, grid);
  for (auto [n, k] : {std::pair{1, 0}, {3, 0}, {3, 1}, {5, 2}}) {
    const auto d = trace_distance_diss(g, n, k);
    for (std::size_t i = 1; i < g.size(); ++i) {
      const double dg = std::norm(g[i]) - std::norm(g[i - 1]);
      const double dd = d[i] - d[i - 1];
      if (std::abs(dg) > 1e-12) CHECK((dg > 0) == (dd > 0));
    }
  }
}

TEST_CASE("choi matrix of the intermediate map", "[choi]") {
  const cplx gt(0.4, 0.3);
  const auto same = choi_intermediate_map(gt, gt, 3, 1);
  CHECK_THAT(numerics::min_eigenvalue_hermitian(same), WithinAbs(0.0, 1e-10));
  CHECK(same(0, 0) == cplx(1.0));
  CHECK(same(1, 1) == cplx(0.0));

  const auto shrink = choi_intermediate_map(gt, 0.9 * gt * std::polar(1.0, 0.2), 3, 1);
  CHECK(numerics::min_eigenvalue_hermitian(shrink) >= -1e-10);
  const auto grow = choi_intermediate_map(gt, 1.01 * gt, 3, 1);
  CHECK(numerics::min_eigenvalue_hermitian(grow) < 0.0);

  CHECK_THROWS_AS(choi_intermediate_map(0.0, 0.5, 1, 0), NumericError);
  CHECK_THROWS_AS(choi_intermediate_map(0.5, 0.5, 2, 1), NullOutcome);
}

TEST_CASE("cp divisibility", "[divisibility]") {
  const auto grid = numerics::TimeGrid::spanning(60000.0, 30.0);
  SECTION("overdamped lorentzian is divisible") {
    const auto g = decay_amplitude(SpectralDensity::lorentzian(1e-3, 4e-3, 1.0), 1.0, grid);
    const auto rep = is_cp_divisible(g);
    CHECK(rep.divisible);
    CHECK(rep.choi_divisible);
    CHECK(rep.criteria_agree());
    CHECK_FALSE(rep.first_violation_time.has_value());
  }
  SECTION("underdamped lorentzian is not") {
    const auto g = decay_amplitude(SpectralDensity::lorentzian(1e-3, 1e-4, 1.0), 1.0, grid);
    for (auto [n, k] : {std::pair{1, 0}, {3, 0}, {3, 1}}) {
      const auto rep = is_cp_divisible(g, std::nullopt, n, k);
      CHECK_FALSE(rep.divisible);
      CHECK_FALSE(rep.choi_divisible);
      CHECK(rep.criteria_agree());
      REQUIRE(rep.first_violation_time.has_value());
      CHECK(*rep.first_violation_time > 0.0);
    }
  }
  SECTION("no coupling") {
    const auto g = decay_amplitude(SpectralDensity::zero(), 1.0, numerics::TimeGrid::spanning(10.0, 0.1));
    const auto rep = is_cp_divisible(g);
    CHECK(rep.divisible);
    CHECK(rep.criteria_agree());
  }
}
