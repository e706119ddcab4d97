#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zenotraj/errors.hpp"

namespace zenotraj::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct ResultTable {
  std::vector<std::string> columns;
  std::string units;
  std::vector<std::vector<double>> rows;
  nlohmann::json metadata = nlohmann::json::object();

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size()) {
      throw std::logic_error("ResultTable: row has " + std::to_string(row.size()) + " values for " +
                             std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
};

// Shortest "%.17g" rendering; always '.' as the decimal separator because the
// process never calls setlocale.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(const ResultTable& t, std::ostream& os) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

inline nlohmann::json to_json(const ResultTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (double v : row) {
      if (!std::isfinite(v)) throw NumericError("emit: non-finite value cannot be written as JSON");
      r.push_back(v);
    }
    rows.push_back(std::move(r));
  }
  return {{"columns", t.columns}, {"units", t.units}, {"metadata", t.metadata}, {"rows", std::move(rows)}};
}

inline void write_json(const ResultTable& t, std::ostream& os) { os << to_json(t).dump(2) << '\n'; }

inline ResultTable from_json(const nlohmann::json& j) {
  ResultTable t;
  t.columns = j.at("columns").get<std::vector<std::string>>();
  t.units = j.at("units").get<std::string>();
  t.metadata = j.at("metadata");
  for (const auto& r : j.at("rows")) t.add_row(r.get<std::vector<double>>());
  return t;
}

inline std::string render(const ResultTable& t, const std::string& format) {
  std::ostringstream os;
  if (format == "csv") write_csv(t, os);
  else if (format == "json") write_json(t, os);
  else throw std::invalid_argument("emit: unknown format '" + format + "'");
  return os.str();
}

// Writes to `path`, or to stdout for "-". CSV carries no metadata; a JSON
// sidecar is not written implicitly.
inline void emit(const ResultTable& t, const std::string& format, const std::string& path) {
  const std::string text = render(t, format);
  if (path == "-" || path.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw std::runtime_error("emit: failed writing to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit: cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("emit: failed writing '" + path + "'");
}

}  // namespace zenotraj::cli
