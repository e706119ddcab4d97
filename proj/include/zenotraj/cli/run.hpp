#pragma once

// Scenario orchestration: RunConfig -> ResultTable.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "zenotraj/cli/config.hpp"
#include "zenotraj/cli/result_table.hpp"
#include "zenotraj/dephasing.hpp"
#include "zenotraj/dicke.hpp"
#include "zenotraj/dissipative.hpp"
#include "zenotraj/errors.hpp"
#include "zenotraj/model/interferometer.hpp"
#include "zenotraj/model/qubit_state.hpp"
#include "zenotraj/numerics/time_grid.hpp"
#include "zenotraj/perturbation.hpp"
#include "zenotraj/zeno_filter.hpp"

namespace zenotraj::cli {

// fn(i) for i in [0, count) on up to `threads` workers; results in index
// order. The exception of the lowest failing index is rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, F&& fn, int threads) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

namespace detail {

inline std::string pair_label(int paths, int shifted) {
  return "N" + std::to_string(paths) + "_n" + std::to_string(shifted);
}

inline std::vector<double> linspace(double a, double b, int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (points - 1);
  return out;
}

inline std::pair<model::cplx, model::cplx> initial_amplitudes(const std::string& name) {
  const double h = 1.0 / std::sqrt(2.0);
  if (name == "excited") return {1.0, 0.0};
  if (name == "ground") return {0.0, 1.0};
  if (name == "plus") return {h, h};
  if (name == "minus") return {h, -h};
  throw ConfigError("initial: unknown state '" + name + "'");
}

inline dissipative::AmplitudeMethod amplitude_method(const std::string& m) {
  if (m == "volterra") return dissipative::AmplitudeMethod::volterra;
  if (m == "closed") return dissipative::AmplitudeMethod::closed_form;
  return dissipative::AmplitudeMethod::automatic;
}

inline const char* source_name(dissipative::AmplitudeSource s) {
  return s == dissipative::AmplitudeSource::volterra ? "volterra" : "lorentzian_closed_form";
}

inline nlohmann::json base_metadata(const RunConfig& c) {
  nlohmann::json m;
  m["tool"] = "zenotraj";
  m["version"] = kToolVersion;
  m["scenario"] = c.scenario;
  m["recipe"] = c.recipe.empty() ? nlohmann::json(nullptr) : nlohmann::json(c.recipe);
  m["config"] = c.resolved;
  m["decisions"] = {
      {"interference_factor", "R = (N - 2n)^2 / N^2"},
      {"spectral_truncation", "bath integrals run over [0, omega_max]"},
  };
  return m;
}

inline std::size_t strict_local_minima(const std::vector<double>& v) {
  std::size_t count = 0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    if (v[k] < v[k - 1] && v[k] < v[k + 1]) ++count;
  }
  return count;
}

}  // namespace detail

inline ResultTable run_filter(const RunConfig& c) {
  using zeno_filter::FilterSpec;
  const auto j = c.spectral.build(c.omega_q);
  const int shifted = c.pairs.front().second;
  std::vector<FilterSpec> specs;
  ResultTable t;
  t.columns = {"omega", "J"};
  for (int nn : c.n_list) {
    specs.push_back(FilterSpec::diss(nn, shifted, c.t, c.omega_q));
    t.columns.push_back(shifted == 0 ? "F_N" + std::to_string(nn) : "F_" + detail::pair_label(nn, shifted));
  }
  for (int nt : c.ntilde_list) {
    specs.push_back(FilterSpec::traditional(nt, c.t, c.omega_q));
    t.columns.push_back("Ftilde_N" + std::to_string(nt));
  }
  t.units = "omega in units of omega_q; F in units of t^2 (1/omega_q^2)";

  for (double w : detail::linspace(c.omega_min, c.omega_hi, c.omega_points)) {
    std::vector<double> row{w, j(w)};
    for (const auto& f : specs) row.push_back(f(w));
    t.add_row(std::move(row));
  }

  // Decay factors and widths, one task per filter.
  struct Summary {
    double gamma;
    double width;
  };
  double ntilde_max = 1.0;
  for (int nt : c.ntilde_list) ntilde_max = std::max(ntilde_max, static_cast<double>(nt));
  const double window = 4.0 * std::numbers::pi * ntilde_max / c.t;
  const auto summaries = parallel_map<Summary>(
      specs.size(),
      [&](std::size_t i) {
        const auto dw = detail::linspace(-window, window, 200001);
        std::vector<double> shape(dw.size());
        for (std::size_t k = 0; k < dw.size(); ++k) shape[k] = specs[i](c.omega_q + dw[k]);
        return Summary{zeno_filter::decay_factor_overlap(j, specs[i]), zeno_filter::fwhm(dw, shape)};
      },
      c.threads);

  t.metadata = detail::base_metadata(c);
  t.metadata["decisions"]["omega_q_t"] = c.omega_q * c.t;
  t.metadata["decisions"]["traditional_filter"] = "(t^2/Ntilde) sinc^2[(w - omega_q) t / (2 Ntilde)]";
  nlohmann::json gammas, widths;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    gammas[t.columns[i + 2]] = summaries[i].gamma;
    widths[t.columns[i + 2]] = summaries[i].width;
  }
  t.metadata["decay_factor"] = gammas;
  t.metadata["fwhm"] = widths;
  return t;
}

inline ResultTable run_dynamics_diss(const RunConfig& c) {
  const auto j = c.spectral.build(c.omega_q);
  const auto grid = numerics::TimeGrid::spanning(c.tmax, c.dt);
  const auto g = dissipative::decay_amplitude(j, c.omega_q, grid, detail::amplitude_method(c.method));
  const auto [ce, cg] = detail::initial_amplitudes(c.initial);
  const model::QubitState psi0 = model::QubitState::pure(ce, cg);

  ResultTable t;
  t.columns = {"t", "abs_G2"};
  const std::vector<std::string> per{"p_success", "survival", "decay_factor", "trace_distance",
                                     "rho_ee",    "rho_gg",   "re_rho_eg",    "im_rho_eg"};
  for (const auto& [nn, k] : c.pairs) {
    for (const auto& name : per) t.columns.push_back(name + "_" + detail::pair_label(nn, k));
  }
  t.units = "t in units of 1/omega_q";
  for (std::size_t k = 0; k < grid.count(); ++k) {
    std::vector<double> row{grid.time(k), std::norm(g[k])};
    for (const auto& [nn, sh] : c.pairs) {
      const auto raw = dissipative::postselected_state_diss(ce, cg, g[k], nn, sh);
      const auto norm = model::normalize(raw);
      const double survival = (psi0.rho * norm.state.rho).trace().real();
      row.push_back(norm.success_probability);
      row.push_back(survival);
      row.push_back(dissipative::decay_factor(survival));
      row.push_back(dissipative::trace_distance_diss(g[k], nn, sh));
      row.push_back(norm.state.population_excited());
      row.push_back(norm.state.population_ground());
      row.push_back(norm.state.coherence().real());
      row.push_back(norm.state.coherence().imag());
    }
    t.add_row(std::move(row));
  }
  t.metadata = detail::base_metadata(c);
  t.metadata["decisions"]["amplitude_source"] = detail::source_name(g.source);
  t.metadata["decisions"]["initial_state"] = c.initial;
  nlohmann::json cp;
  for (const auto& [nn, sh] : c.pairs) {
    const auto rep = dissipative::is_cp_divisible(g, std::nullopt, nn, sh);
    cp[detail::pair_label(nn, sh)] = {{"cp_divisible", rep.divisible},
                                      {"criteria_agree", rep.criteria_agree()},
                                      {"first_violation_time", rep.first_violation_time
                                                                   ? nlohmann::json(*rep.first_violation_time)
                                                                   : nlohmann::json(nullptr)}};
  }
  t.metadata["divisibility"] = cp;
  return t;
}

inline ResultTable run_dynamics_deph(const RunConfig& c) {
  const dephasing::DephasingParams params{c.spectral.build(c.omega_q), c.temperature};
  const auto grid = numerics::TimeGrid::spanning(c.tmax, c.dt);
  const auto gammas = parallel_map<double>(
      grid.count(), [&](std::size_t k) { return dephasing::dephasing_exponent(params, grid.time(k)); }, c.threads);
  const auto [ce, cg] = detail::initial_amplitudes(c.initial);
  const auto rho0 = model::QubitState::pure(ce, cg);

  ResultTable t;
  t.columns = {"t", "Gamma", "phi"};
  const std::vector<std::string> per{"Phi", "trace_distance", "p_success", "rho_ee", "rho_gg", "re_rho_eg",
                                     "im_rho_eg"};
  for (const auto& [nn, k] : c.pairs) {
    for (const auto& name : per) t.columns.push_back(name + "_" + detail::pair_label(nn, k));
  }
  t.units = "t in units of 1/omega_c (Ohmic) or 1/omega_q; temperature in frequency units";
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double phi = dephasing::single_path_factor(gammas[k]);
    std::vector<double> row{grid.time(k), gammas[k], phi};
    for (const auto& [nn, sh] : c.pairs) {
      const double big = dephasing::modified_dephasing(phi, nn, sh);
      const auto norm = model::normalize(dephasing::postselected_state_deph(rho0, phi, nn, sh));
      row.push_back(big);
      row.push_back(dephasing::trace_distance_deph(big));
      row.push_back(norm.success_probability);
      row.push_back(norm.state.population_excited());
      row.push_back(norm.state.population_ground());
      row.push_back(norm.state.coherence().real());
      row.push_back(norm.state.coherence().imag());
    }
    t.add_row(std::move(row));
  }
  t.metadata = detail::base_metadata(c);
  t.metadata["decisions"]["phi_T"] = "exp(-Gamma_T), Gamma_T = 4 int J/w^2 coth(w/2T) (1 - cos wt) dw";
  t.metadata["decisions"]["initial_state"] = c.initial;
  return t;
}

inline ResultTable run_dicke(const RunConfig& c) {
  const double t_phys = c.tmax / c.gamma0;
  const auto series = parallel_map<dicke::PopulationSeries>(
      c.pairs.size(),
      [&](std::size_t i) {
        return dicke::excited_population_equal_distance(c.pairs[i].first, c.pairs[i].second, c.gamma0, c.sinc,
                                                        t_phys);
      },
      c.threads);
  const auto [g_plus, g_minus] = dicke::dicke_rates_two_atom(c.gamma0, dicke::sinc_inverse(c.sinc));

  ResultTable t;
  t.columns = {"gamma0_t"};
  for (const auto& [nn, k] : c.pairs) t.columns.push_back("Pe_" + detail::pair_label(nn, k));
  t.columns.insert(t.columns.end(), {"exp_minus_Gamma_plus_t", "exp_minus_Gamma_minus_t", "exp_minus_Gamma0_t"});
  t.units = "time column is Gamma0 t; tmax is given in units of 1/Gamma0";
  const auto& grid = series.front().grid;
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double time = grid.time(k);
    std::vector<double> row{c.gamma0 * time};
    for (const auto& s : series) row.push_back(s.numeric[k]);
    row.push_back(std::exp(-g_plus * time));
    row.push_back(std::exp(-g_minus * time));
    row.push_back(std::exp(-c.gamma0 * time));
    t.add_row(std::move(row));
  }
  t.metadata = detail::base_metadata(c);
  t.metadata["decisions"]["dicke_time_unit"] = "Gamma0 t";
  t.metadata["decisions"]["rk4_dt"] = "1e-3 / Gamma0";
  t.metadata["decisions"]["cross_term"] = "Gamma0 sum_{i!=j} sinc(q d_ij) L_i rho L_j^+ as written; "
                                          "trace preservation checked at construction";
  t.metadata["decisions"]["geometry"] = "equal pair distances (segment, triangle, tetrahedron)";
  nlohmann::json dev;
  for (std::size_t i = 0; i < series.size(); ++i) {
    double worst = 0.0;
    for (std::size_t k = 0; k < series[i].numeric.size(); ++k) {
      worst = std::max(worst, std::abs(series[i].numeric[k] - series[i].analytic[k]));
    }
    dev[detail::pair_label(c.pairs[i].first, c.pairs[i].second)] = worst;
  }
  t.metadata["max_abs_numeric_minus_closed_form"] = dev;
  return t;
}

inline ResultTable run_nonmarkov(const RunConfig& c) {
  const auto j = c.spectral.build(c.omega_q);
  const auto grid = numerics::TimeGrid::spanning(c.tmax, c.dt);
  ResultTable t;
  t.columns = {"t"};
  for (const auto& [nn, k] : c.pairs) t.columns.push_back("D_" + detail::pair_label(nn, k));
  t.metadata = detail::base_metadata(c);
  std::vector<std::vector<double>> cols;
  nlohmann::json diag;

  if (c.spectral.kind == "lorentzian") {
    t.units = "t in units of 1/omega_q";
    const auto g = dissipative::decay_amplitude(j, c.omega_q, grid, detail::amplitude_method(c.method));
    t.metadata["decisions"]["model"] = "dissipative";
    t.metadata["decisions"]["amplitude_source"] = detail::source_name(g.source);
    for (const auto& [nn, sh] : c.pairs) {
      cols.push_back(dissipative::trace_distance_diss(g, nn, sh));
      const auto rep = dissipative::is_cp_divisible(g, std::nullopt, nn, sh);
      diag[detail::pair_label(nn, sh)] = {
          {"cp_divisible", rep.divisible},
          {"choi_divisible", rep.choi_divisible},
          {"criteria_agree", rep.criteria_agree()},
          {"first_violation_time",
           rep.first_violation_time ? nlohmann::json(*rep.first_violation_time) : nlohmann::json(nullptr)},
          {"strict_local_minima", detail::strict_local_minima(cols.back())}};
    }
  } else {
    t.units = "t in units of 1/omega_c";
    const dephasing::DephasingParams params{j, c.temperature};
    const auto gammas = parallel_map<double>(
        grid.count(), [&](std::size_t k) { return dephasing::dephasing_exponent(params, grid.time(k)); },
        c.threads);
    t.metadata["decisions"]["model"] = "dephasing";
    t.metadata["decisions"]["phi_T"] = "exp(-Gamma_T)";
    for (const auto& [nn, sh] : c.pairs) {
      std::vector<double> d;
      d.reserve(grid.count());
      for (double gm : gammas) {
        d.push_back(dephasing::trace_distance_deph(
            dephasing::modified_dephasing(dephasing::single_path_factor(gm), nn, sh)));
      }
      const auto zero = dephasing::coherence_zero_time(params, nn, sh, c.tmax, 200);
      diag[detail::pair_label(nn, sh)] = {{"zero_crossing_time", zero ? nlohmann::json(*zero) : nlohmann::json(nullptr)},
                                          {"final_value", d.back()},
                                          {"strict_local_minima", detail::strict_local_minima(d)}};
      cols.push_back(std::move(d));
    }
  }
  for (std::size_t k = 0; k < grid.count(); ++k) {
    std::vector<double> row{grid.time(k)};
    for (const auto& col : cols) row.push_back(col[k]);
    t.add_row(std::move(row));
  }
  t.metadata["diagnostics"] = diag;
  return t;
}

inline ResultTable run_perturbation(const RunConfig& c) {
  const auto j = c.spectral.build(c.omega_q);
  const bool diss = c.coupling == "dissipative";
  const auto m = diss ? perturbation::dissipative_coupling(j, c.omega_q)
                      : perturbation::dephasing_coupling(j, c.omega_q, c.temperature);
  const auto psi0 = diss ? model::QubitState::excited() : model::QubitState::plus();
  const bool binary = c.phases.empty();
  const auto phases = binary ? model::InterferometerConfig::binary(c.pairs.front().first, c.pairs.front().second).phases()
                             : c.phases;
  const double paths = static_cast<double>(phases.size());
  const double closed_pref = paths / model::phase_sum(phases);
  const auto spec = diss ? zeno_filter::FilterSpec::diss(1, 0, c.t, c.omega_q) : zeno_filter::FilterSpec::deph(1, 0, c.t);

  const auto omegas = detail::linspace(c.omega_min, c.omega_hi, c.omega_points);
  const auto general = perturbation::general_filter(m, psi0, omegas, c.t, phases);

  ResultTable t;
  t.columns = {"omega", "J", "F_general", "F_closed_form"};
  t.units = "omega in units of omega_q; F in units of 1/omega_q^2";
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const double closed = closed_pref * spec(omegas[i]);
    num += general[i] * closed;
    den += closed * closed;
    t.add_row({omegas[i], j(omegas[i]), general[i], closed});
  }

  t.metadata = detail::base_metadata(c);
  t.metadata["decisions"]["coupling"] = c.coupling;
  t.metadata["decisions"]["initial_state"] = diss ? "excited" : "plus";
  t.metadata["decisions"]["closed_form"] = diss ? "N/sum_kl e^{-i(phi_k - phi_l)} t^2 sinc^2[(w - omega_q) t/2]"
                                                : "(1/2) N/sum_kl e^{-i(phi_k - phi_l)} (1 - cos wt)/w^2";
  t.metadata["fitted_constant"] = den > 0.0 ? num / den : 0.0;
  t.metadata["general_decay_factor"] = perturbation::general_decay_factor(m, psi0, c.t, phases);
  t.metadata["closed_form_decay_factor"] = closed_pref * zeno_filter::decay_factor_overlap(j, spec);
  const auto block = perturbation::second_order_block(m, psi0, 0, c.t);
  t.metadata["second_order_block"] = {{"trace_defect", block.trace_defect},
                                      {"trace_norm", block.trace_norm},
                                      {"expansion_valid", block.small}};
  if (diss && binary) {
    const auto [nn, sh] = c.pairs.front();
    nlohmann::json eps = nlohmann::json::array();
    for (double e : c.epsilon) {
      const auto cmp = zeno_filter::perturbative_consistency(j, c.omega_q, c.t, nn, sh, e);
      eps.push_back({{"epsilon", e},
                     {"gamma_exact", cmp.gamma_exact},
                     {"gamma_overlap", cmp.gamma_overlap},
                     {"relative_mismatch", cmp.relative_mismatch()}});
    }
    t.metadata["perturbative_consistency"] = eps;
  }
  return t;
}

inline ResultTable run(const RunConfig& c) {
  if (c.scenario == "filter") return run_filter(c);
  if (c.scenario == "dynamics-diss") return run_dynamics_diss(c);
  if (c.scenario == "dynamics-deph") return run_dynamics_deph(c);
  if (c.scenario == "dicke") return run_dicke(c);
  if (c.scenario == "nonmarkov") return run_nonmarkov(c);
  if (c.scenario == "perturbation") return run_perturbation(c);
  throw ConfigError("scenario: unknown scenario '" + c.scenario + "'");
}

}  // namespace zenotraj::cli
