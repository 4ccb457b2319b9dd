#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "distortia/errors.hpp"
#include "distortia/generator.hpp"
#include "distortia/portfolio.hpp"

namespace distortia {

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError(where + ": cannot parse number '" + s + "'");
  }
}

inline std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                                      size_t min_cols) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file '" + path + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    auto fields = split_csv_line(t);
    if (fields.size() < min_cols)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected at least " +
                            std::to_string(min_cols) + " columns");
    rows.push_back(std::move(fields));
  }
  if (rows.size() < 2)
    throw ValidationError(path + ": needs a header row and at least one data row");
  return rows;
}

}  // namespace detail

/// Sample file: header `pnl` with an optional second column `weight`.
inline std::pair<std::vector<double>, std::optional<std::vector<double>>> read_samples_csv(
    const std::string& path) {
  auto rows = detail::read_csv(path, 1);
  const auto& header = rows.front();
  if (header[0] != "pnl")
    throw ValidationError(path + ": first column must be 'pnl', got '" + header[0] + "'");
  bool weighted = header.size() >= 2 && header[1] == "weight";
  std::vector<double> values;
  std::vector<double> weights;
  for (size_t i = 1; i < rows.size(); ++i) {
    std::string where = path + ":" + std::to_string(i + 1);
    values.push_back(detail::parse_double(rows[i][0], where));
    if (weighted) {
      if (rows[i].size() < 2) throw ValidationError(where + ": missing weight");
      weights.push_back(detail::parse_double(rows[i][1], where));
    }
  }
  if (weighted) return {values, weights};
  return {values, std::nullopt};
}

/// Knot file: header `x,g`, rows sorted by x.
inline std::vector<Knot> read_knots_csv(const std::string& path) {
  auto rows = detail::read_csv(path, 2);
  if (rows.front()[0] != "x" || rows.front()[1] != "g")
    throw ValidationError(path + ": header must be 'x,g'");
  std::vector<Knot> knots;
  for (size_t i = 1; i < rows.size(); ++i) {
    std::string where = path + ":" + std::to_string(i + 1);
    knots.push_back({detail::parse_double(rows[i][0], where),
                     detail::parse_double(rows[i][1], where)});
  }
  return knots;
}

inline void write_knots_csv(std::ostream& os, const std::vector<Knot>& knots) {
  os << "x,g\n";
  char buf[64];
  for (const auto& k : knots) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", k.x, k.g);
    os << buf;
  }
}

/// Distortion table: header `x,psi`.
inline std::vector<std::pair<double, double>> read_distortion_csv(const std::string& path) {
  auto rows = detail::read_csv(path, 2);
  if (rows.front()[0] != "x" || rows.front()[1] != "psi")
    throw ValidationError(path + ": header must be 'x,psi'");
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 1; i < rows.size(); ++i) {
    std::string where = path + ":" + std::to_string(i + 1);
    pts.emplace_back(detail::parse_double(rows[i][0], where),
                     detail::parse_double(rows[i][1], where));
  }
  return pts;
}

/// Scenario file: header `p,asset1,...,assetd`.
inline ScenarioMatrix read_scenarios_csv(const std::string& path) {
  auto rows = detail::read_csv(path, 2);
  if (rows.front()[0] != "p")
    throw ValidationError(path + ": first column must be 'p', got '" + rows.front()[0] + "'");
  size_t d = rows.front().size() - 1;
  std::vector<std::vector<double>> gains;
  std::vector<double> probs;
  for (size_t i = 1; i < rows.size(); ++i) {
    std::string where = path + ":" + std::to_string(i + 1);
    if (rows[i].size() != d + 1)
      throw ValidationError(where + ": expected " + std::to_string(d + 1) + " columns");
    probs.push_back(detail::parse_double(rows[i][0], where));
    std::vector<double> row;
    for (size_t j = 1; j <= d; ++j) row.push_back(detail::parse_double(rows[i][j], where));
    gains.push_back(std::move(row));
  }
  return make_scenario_matrix(std::move(gains), std::move(probs));
}

}  // namespace distortia
