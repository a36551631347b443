// table.hpp - minimal numeric table with CSV output: one header row, values
// rendered with 12 significant digits so identical runs produce identical
// bytes.
#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinpair {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size()) {
      throw std::invalid_argument("Table: row width does not match header");
    }
    rows.push_back(std::move(row));
  }
};

inline void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  char buf[40];
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.12g", row[c]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

inline void write_csv(const Table& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
  }
  write_csv(table, out);
  if (!out.good()) {
    throw std::runtime_error("write_csv: write to '" + path + "' failed");
  }
}

}  // namespace spinpair
