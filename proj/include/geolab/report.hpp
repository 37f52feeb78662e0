#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace geolab {

using Cell = std::variant<std::int64_t, double, std::string>;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (auto p = std::get_if<std::int64_t>(&c)) return std::to_string(*p);
  if (auto p = std::get_if<double>(&c)) return format_double(*p);
  return std::get<std::string>(c);
}

struct Table {
  std::string name;
  int version = 1;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw PreconditionError("row width does not match the " + name + " columns");
    rows.push_back(std::move(row));
  }
};

inline void write_csv(std::ostream& os, const Table& t) {
  os << "# " << t.name << " v" << t.version << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << "\n";
  }
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
  if (auto p = std::get_if<std::int64_t>(&c)) return *p;
  if (auto p = std::get_if<double>(&c)) {
    if (!std::isfinite(*p)) return format_double(*p);
    return std::stod(format_double(*p));
  }
  return std::get<std::string>(c);
}

inline nlohmann::ordered_json table_json(const Table& t) {
  nlohmann::ordered_json j;
  j["report"] = t.name;
  j["version"] = t.version;
  j["columns"] = t.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j;
}

inline void write_json(std::ostream& os, const std::vector<Table>& tables,
                       const std::vector<std::pair<std::string, std::string>>& config) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& t : tables) arr.push_back(table_json(t));
  j["tables"] = arr;
  os << j.dump(2) << "\n";
}

inline void write_csv(std::ostream& os, const std::vector<Table>& tables) {
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) os << "\n";
    write_csv(os, tables[i]);
  }
}

}  // namespace geolab
