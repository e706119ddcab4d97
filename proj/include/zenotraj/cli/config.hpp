#pragma once

// Run configuration: defaults < recipe < JSON file < command line.
//
// Every layer is a flat JSON object over the same key set, so a config file
// and the command line are interchangeable. Unknown keys are rejected.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "zenotraj/errors.hpp"
#include "zenotraj/model/interferometer.hpp"
#include "zenotraj/model/spectral_density.hpp"

namespace zenotraj::cli {

using json = nlohmann::json;

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"filter", "dynamics-diss", "dynamics-deph",
                                              "dicke",  "nonmarkov",     "perturbation"};
  return names;
}

inline const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names{"fig2", "fig3", "fig4a", "fig4b", "fig4c"};
  return names;
}

enum class KeyType { number, integer, string, number_list, integer_list, pair_list };

// Key -> (type, command-line flag).
inline const std::map<std::string, std::pair<KeyType, std::string>>& key_table() {
  static const std::map<std::string, std::pair<KeyType, std::string>> t{
      {"scenario", {KeyType::string, "scenario"}},
      {"recipe", {KeyType::string, "--recipe"}},
      {"spectral", {KeyType::string, "--spectral"}},
      {"gamma0", {KeyType::number, "--gamma0"}},
      {"lambda", {KeyType::number, "--lambda"}},
      {"omega_q", {KeyType::number, "--omega-q"}},
      {"eta", {KeyType::number, "--eta"}},
      {"s", {KeyType::number, "--s"}},
      {"omega_c", {KeyType::number, "--omega-c"}},
      {"omega_m", {KeyType::number, "--omega-m"}},
      {"delta", {KeyType::number, "--delta"}},
      {"omega_max", {KeyType::number, "--omega-max"}},
      {"temperature", {KeyType::number, "--temperature"}},
      {"sinc", {KeyType::number, "--sinc"}},
      {"N", {KeyType::integer, "--N"}},
      {"n", {KeyType::integer, "--n"}},
      {"phases", {KeyType::number_list, "--phases"}},
      {"pairs", {KeyType::pair_list, "--pairs"}},
      {"N_list", {KeyType::integer_list, "--N-list"}},
      {"Ntilde_list", {KeyType::integer_list, "--Ntilde-list"}},
      {"t", {KeyType::number, "--t"}},
      {"tmax", {KeyType::number, "--tmax"}},
      {"dt", {KeyType::number, "--dt"}},
      {"epsilon", {KeyType::number_list, "--epsilon"}},
      {"initial", {KeyType::string, "--initial"}},
      {"coupling", {KeyType::string, "--coupling"}},
      {"method", {KeyType::string, "--method"}},
      {"omega_min", {KeyType::number, "--omega-min"}},
      {"omega_hi", {KeyType::number, "--omega-hi"}},
      {"omega_points", {KeyType::integer, "--omega-points"}},
      {"format", {KeyType::string, "--format"}},
      {"out", {KeyType::string, "--out"}},
      {"threads", {KeyType::integer, "--threads"}},
  };
  return t;
}

struct SpectralSpec {
  std::string kind = "lorentzian";  // lorentzian | ohmic | gaussian
  double gamma0 = 1.0;
  double lambda = 0.1;
  double eta = 1.0 / 3.0;
  double s = 1.0;
  double omega_c = 1.0;
  double omega_m = 1.5;
  double delta = 0.2;
  std::optional<double> omega_max;

  model::SpectralDensity build(double omega_q) const {
    if (kind == "lorentzian") return model::SpectralDensity::lorentzian(gamma0, lambda, omega_q, omega_max);
    if (kind == "ohmic") return model::SpectralDensity::ohmic(eta, s, omega_c, omega_max);
    if (kind == "gaussian") return model::SpectralDensity::gaussian_peak(omega_m, delta, omega_max);
    throw ConfigError("spectral: unknown kind '" + kind + "' (lorentzian, ohmic, gaussian)");
  }
};

struct RunConfig {
  std::string scenario;
  std::string recipe;
  SpectralSpec spectral;
  double omega_q = 1.0;
  double temperature = 0.0;
  double gamma0 = 1.0;         // Dicke single-site rate
  double sinc = 1.0 / 6.0;     // collective factor sinc(q d)
  std::vector<std::pair<int, int>> pairs;  // (N, n)
  std::vector<double> phases;
  std::vector<int> n_list;
  std::vector<int> ntilde_list;
  double t = 5.0;
  double tmax = 10.0;
  double dt = 0.01;
  std::vector<double> epsilon;
  std::string initial = "excited";
  std::string coupling = "dissipative";
  std::string method = "auto";
  double omega_min = 0.0;
  double omega_hi = 3.0;
  int omega_points = 601;
  std::string format = "csv";
  std::string out = "-";
  int threads = 0;  // 0: hardware concurrency
  json resolved;    // merged layers, stamped into output metadata
};

namespace detail {

inline json defaults() {
  return json{{"spectral", "lorentzian"}, {"gamma0", 1.0},   {"lambda", 0.1},       {"omega_q", 1.0},
              {"eta", 1.0 / 3.0},         {"s", 1.0},        {"omega_c", 1.0},      {"omega_m", 1.5},
              {"delta", 0.2},             {"temperature", 0.0}, {"sinc", 1.0 / 6.0}, {"N", 1},
              {"n", 0},                   {"N_list", {1, 4, 8}}, {"Ntilde_list", {1, 4, 8}},
              {"t", 5.0},                 {"tmax", 10.0},    {"dt", 0.01},          {"epsilon", {0.2, 0.1, 0.05}},
              {"initial", "excited"},     {"coupling", "dissipative"}, {"method", "auto"},
              {"omega_min", 0.0},         {"omega_hi", 3.0}, {"omega_points", 601}, {"format", "csv"},
              {"out", "-"},               {"threads", 0}};
}

inline json recipe_layer(const std::string& recipe) {
  if (recipe == "fig2") {
    return json{{"scenario", "filter"}, {"spectral", "gaussian"}, {"omega_m", 1.5}, {"delta", 0.2},
                {"omega_q", 1.0},       {"t", 5.0},               {"N_list", {1, 4, 8}},
                {"Ntilde_list", {1, 4, 8}}, {"n", 0}, {"omega_min", 0.0}, {"omega_hi", 3.0}, {"omega_points", 3001}};
  }
  if (recipe == "fig3") {
    return json{{"scenario", "dicke"}, {"sinc", 1.0 / 6.0}, {"gamma0", 0.01}, {"tmax", 5.0},
                {"pairs", {{3, 0}, {3, 1}}}};
  }
  if (recipe == "fig4a") {
    return json{{"scenario", "nonmarkov"}, {"spectral", "lorentzian"}, {"gamma0", 1e-3}, {"lambda", 1e-4},
                {"omega_q", 1.0},          {"tmax", 6e4},  {"dt", 30.0},
                {"pairs", {{1, 0}, {3, 0}, {3, 1}}}};
  }
  if (recipe == "fig4b") {
    return json{{"scenario", "nonmarkov"}, {"spectral", "ohmic"}, {"eta", 1.0 / 3.0}, {"s", 1.0},
                {"omega_c", 1.0},          {"temperature", 0.0},  {"tmax", 10.0},     {"dt", 0.01},
                {"pairs", {{1, 0}, {3, 0}, {3, 1}}}};
  }
  if (recipe == "fig4c") {
    return json{{"scenario", "nonmarkov"}, {"spectral", "ohmic"}, {"eta", 1.0 / 3.0}, {"s", 4.0},
                {"omega_c", 1.0},          {"temperature", 0.0},  {"tmax", 50.0},     {"dt", 0.05},
                {"pairs", {{1, 0}, {3, 0}, {3, 1}}}};
  }
  throw ConfigError("recipe: unknown recipe '" + recipe + "' (fig2, fig3, fig4a, fig4b, fig4c)");
}

inline void check_value(const std::string& key, const json& v) {
  const auto& table = key_table();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown configuration key '" + key + "'");
  auto bad = [&](const char* want) { throw ConfigError(key + ": expected " + want + ", got " + v.dump()); };
  switch (it->second.first) {
    case KeyType::number:
      if (!v.is_number()) bad("a number");
      break;
    case KeyType::integer:
      if (!v.is_number_integer()) bad("an integer");
      break;
    case KeyType::string:
      if (!v.is_string()) bad("a string");
      break;
    case KeyType::number_list:
      if (!v.is_array()) bad("a list of numbers");
      for (const auto& x : v) {
        if (!x.is_number()) bad("a list of numbers");
      }
      break;
    case KeyType::integer_list:
      if (!v.is_array()) bad("a list of integers");
      for (const auto& x : v) {
        if (!x.is_number_integer()) bad("a list of integers");
      }
      break;
    case KeyType::pair_list:
      if (!v.is_array()) bad("a list of [N, n] pairs");
      for (const auto& x : v) {
        if (!x.is_array() || x.size() != 2 || !x[0].is_number_integer() || !x[1].is_number_integer()) {
          bad("a list of [N, n] pairs");
        }
      }
      break;
  }
}

inline void check_layer(const json& layer, const std::string& origin) {
  if (!layer.is_object()) throw ConfigError(origin + ": configuration must be a JSON object");
  for (const auto& [k, v] : layer.items()) check_value(k, v);
}

inline void check_pair(int paths, int shifted, const std::string& field) {
  if (paths < 1) throw ConfigError(field + ": path count N must be >= 1");
  if (shifted < 0 || shifted > paths) throw ConfigError(field + ": n must satisfy 0 <= n <= N");
  if (model::is_null_configuration(paths, shifted)) {
    throw ConfigError(field + ": null post-selection: n = N/2 yields a null result "
                      "(completely destructive interference), N=" + std::to_string(paths) +
                      ", n=" + std::to_string(shifted));
  }
}

inline void require_positive(double v, const std::string& field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field + ": must be positive and finite");
}

}  // namespace detail

// Converts one command-line value to its JSON form. Lists are comma
// separated; pairs are written N:n.
inline json cli_value(const std::string& key, const std::string& text) {
  const auto it = key_table().find(key);
  if (it == key_table().end()) throw ConfigError("unknown configuration key '" + key + "'");
  const std::string& flag = it->second.second;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
      throw ConfigError(flag + ": '" + s + "' is not a finite number");
    }
    return v;
  };
  auto integer = [&](const std::string& s) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError(flag + ": '" + s + "' is not an integer");
    return static_cast<int>(v);
  };
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
  };
  switch (it->second.first) {
    case KeyType::number: return number(text);
    case KeyType::integer: return integer(text);
    case KeyType::string: return text;
    case KeyType::number_list: {
      json out = json::array();
      for (const auto& part : split(text, ',')) out.push_back(number(part));
      return out;
    }
    case KeyType::integer_list: {
      json out = json::array();
      for (const auto& part : split(text, ',')) out.push_back(integer(part));
      return out;
    }
    case KeyType::pair_list: {
      json out = json::array();
      for (const auto& part : split(text, ',')) {
        const auto nn = split(part, ':');
        if (nn.size() != 2) throw ConfigError(flag + ": expected N:n pairs, got '" + part + "'");
        out.push_back({integer(nn[0]), integer(nn[1])});
      }
      return out;
    }
  }
  return nullptr;
}

inline json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
  }
}

// Merges the layers, validates, and produces a typed RunConfig.
inline RunConfig resolve_config(const json& file_layer, const json& cli_layer) {
  detail::check_layer(file_layer, "config file");
  detail::check_layer(cli_layer, "command line");

  std::string recipe;
  if (cli_layer.contains("recipe")) recipe = cli_layer["recipe"].get<std::string>();
  else if (file_layer.contains("recipe")) recipe = file_layer["recipe"].get<std::string>();

  json merged = detail::defaults();
  if (!recipe.empty()) merged.update(detail::recipe_layer(recipe));
  merged.update(file_layer);
  merged.update(cli_layer);
  if (!recipe.empty()) {
    const auto want = detail::recipe_layer(recipe)["scenario"].get<std::string>();
    if (merged.value("scenario", want) != want) {
      throw ConfigError("recipe: '" + recipe + "' belongs to scenario '" + want + "', not '" +
                        merged["scenario"].get<std::string>() + "'");
    }
  }

  RunConfig c;
  if (!merged.contains("scenario")) throw ConfigError("scenario: missing (one of filter, dynamics-diss, "
                                                      "dynamics-deph, dicke, nonmarkov, perturbation)");
  c.scenario = merged["scenario"].get<std::string>();
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), c.scenario) == names.end()) {
    throw ConfigError("scenario: unknown scenario '" + c.scenario + "'");
  }
  c.recipe = recipe;

  c.spectral.kind = merged["spectral"].get<std::string>();
  c.spectral.gamma0 = merged["gamma0"].get<double>();
  c.spectral.lambda = merged["lambda"].get<double>();
  c.spectral.eta = merged["eta"].get<double>();
  c.spectral.s = merged["s"].get<double>();
  c.spectral.omega_c = merged["omega_c"].get<double>();
  c.spectral.omega_m = merged["omega_m"].get<double>();
  c.spectral.delta = merged["delta"].get<double>();
  if (merged.contains("omega_max")) c.spectral.omega_max = merged["omega_max"].get<double>();
  c.omega_q = merged["omega_q"].get<double>();
  c.temperature = merged["temperature"].get<double>();
  c.gamma0 = merged["gamma0"].get<double>();
  c.sinc = merged["sinc"].get<double>();
  c.t = merged["t"].get<double>();
  c.tmax = merged["tmax"].get<double>();
  c.dt = merged["dt"].get<double>();
  c.epsilon = merged["epsilon"].get<std::vector<double>>();
  c.initial = merged["initial"].get<std::string>();
  c.coupling = merged["coupling"].get<std::string>();
  c.method = merged["method"].get<std::string>();
  c.omega_min = merged["omega_min"].get<double>();
  c.omega_hi = merged["omega_hi"].get<double>();
  c.omega_points = merged["omega_points"].get<int>();
  c.format = merged["format"].get<std::string>();
  c.out = merged["out"].get<std::string>();
  c.threads = merged["threads"].get<int>();
  c.n_list = merged["N_list"].get<std::vector<int>>();
  c.ntilde_list = merged["Ntilde_list"].get<std::vector<int>>();
  if (merged.contains("phases")) c.phases = merged["phases"].get<std::vector<double>>();

  // Explicit (N, n) on a higher layer than the pair list wins over it.
  const bool pair_given = cli_layer.contains("N") || cli_layer.contains("n") ||
                          (!cli_layer.contains("pairs") && (file_layer.contains("N") || file_layer.contains("n")));
  if (merged.contains("pairs") && !pair_given) {
    for (const auto& p : merged["pairs"]) c.pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
  } else {
    c.pairs.emplace_back(merged["N"].get<int>(), merged["n"].get<int>());
  }
  merged["pairs"] = json::array();
  for (const auto& [nn, k] : c.pairs) merged["pairs"].push_back({nn, k});
  merged.erase("N");
  merged.erase("n");

  // Validation.
  if (c.format != "csv" && c.format != "json") throw ConfigError("format: must be csv or json");
  if (c.threads < 0) throw ConfigError("threads: must be >= 0");
  if (!std::isfinite(c.omega_q)) throw ConfigError("omega_q: must be finite");
  if (!(c.temperature >= 0.0) || !std::isfinite(c.temperature)) throw ConfigError("temperature: must be >= 0");
  const bool uses_pairs = c.scenario != "filter" && !(c.scenario == "perturbation" && !c.phases.empty());
  if (c.pairs.empty()) throw ConfigError("pairs: at least one (N, n) pair is required");
  if (uses_pairs) {
    for (const auto& [nn, k] : c.pairs) detail::check_pair(nn, k, "N/n");
  }
  if (c.scenario == "filter") {
    if (c.n_list.empty() || c.ntilde_list.empty()) throw ConfigError("N_list/Ntilde_list: must not be empty");
    for (int nn : c.n_list) detail::check_pair(nn, c.pairs.front().second, "N_list");
    for (int nt : c.ntilde_list) {
      if (nt < 1) throw ConfigError("Ntilde_list: entries must be >= 1");
    }
  }
  if (c.scenario == "filter" || c.scenario == "perturbation") {
    detail::require_positive(c.t, "t");
    if (c.omega_points < 2) throw ConfigError("omega_points: must be >= 2");
    if (!(c.omega_hi > c.omega_min) || c.omega_min < 0.0) throw ConfigError("omega_min/omega_hi: need 0 <= min < hi");
  } else {
    detail::require_positive(c.tmax, "tmax");
    if (c.scenario != "dicke") detail::require_positive(c.dt, "dt");
  }
  if (c.scenario == "dicke") {
    detail::require_positive(c.gamma0, "gamma0");
    if (!(c.sinc >= 0.0 && c.sinc <= 1.0)) {
      throw ConfigError("sinc: equal-distance layouts need a collective factor in [0, 1]");
    }
    for (const auto& [nn, k] : c.pairs) {
      (void)k;
      if (nn > 4) throw ConfigError("N: equal-distance geometries exist for N <= 4");
    }
  }
  if (c.scenario == "perturbation") {
    if (c.coupling != "dissipative" && c.coupling != "dephasing") {
      throw ConfigError("coupling: must be dissipative or dephasing");
    }
    if (!c.phases.empty()) {
      for (double p : c.phases) {
        if (!std::isfinite(p)) throw ConfigError("phases: entries must be finite");
      }
      if (model::phase_sum(c.phases) <= 1e-12 * static_cast<double>(c.phases.size() * c.phases.size())) {
        throw ConfigError("phases: null post-selection: the phase profile yields a null result "
                          "(completely destructive interference)");
      }
    }
  }
  if (c.scenario == "dynamics-diss" || c.scenario == "dynamics-deph") {
    const std::vector<std::string> ok{"excited", "ground", "plus", "minus"};
    if (std::find(ok.begin(), ok.end(), c.initial) == ok.end()) {
      throw ConfigError("initial: must be excited, ground, plus or minus");
    }
  }
  if (c.method != "auto" && c.method != "volterra" && c.method != "closed") {
    throw ConfigError("method: must be auto, volterra or closed");
  }
  if (c.scenario == "nonmarkov" && c.spectral.kind == "gaussian") {
    throw ConfigError("spectral: nonmarkov runs use lorentzian (dissipative) or ohmic (dephasing)");
  }
  if (c.scenario == "dynamics-deph" && c.spectral.kind == "lorentzian" && c.temperature > 0.0) {
    throw ConfigError("spectral: a Lorentzian has J(0) > 0, which diverges at T > 0 in the dephasing model");
  }
  try {
    (void)c.spectral.build(c.omega_q);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("spectral: ") + e.what());
  }
  c.resolved = std::move(merged);
  return c;
}

}  // namespace zenotraj::cli
