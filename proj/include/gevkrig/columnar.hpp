#ifndef GEVKRIG_COLUMNAR_HPP
#define GEVKRIG_COLUMNAR_HPP

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gevkrig/common.hpp"

namespace gevkrig {

// The interchange container used by every stage: a '#'-prefixed header block
// of "key: value" metadata, one tab-separated column-name line, then data
// rows. Doubles are written with shortest round-trip formatting, so
// parse -> serialize is bit-exact.
struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    throw DataError("missing column '" + name + "'");
  }

  const std::string& meta_at(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) throw DataError("missing header field '" + key + "'");
    return it->second;
  }

  std::string meta_or(const std::string& key, const std::string& fallback) const {
    auto it = meta.find(key);
    return it == meta.end() ? fallback : it->second;
  }

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size())
      throw DataError("row width " + std::to_string(cells.size()) + " != " +
                      std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(cells));
  }

  std::string serialize() const {
    std::ostringstream out;
    for (const auto& [k, v] : meta) out << "# " << k << ": " << v << "\n";
    for (size_t i = 0; i < columns.size(); ++i)
      out << columns[i] << (i + 1 < columns.size() ? '\t' : '\n');
    for (const auto& row : rows)
      for (size_t i = 0; i < row.size(); ++i)
        out << row[i] << (i + 1 < row.size() ? '\t' : '\n');
    return out.str();
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << serialize();
    if (!out) throw DataError("write failed: " + path);
  }

  static Table parse(std::istream& in, const std::string& what) {
    Table t;
    std::string line;
    bool have_columns = false;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line[0] == '#') {
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = line.substr(1, colon - 1);
        std::string value = line.substr(colon + 1);
        auto trim = [](std::string& s) {
          size_t a = s.find_first_not_of(" \t");
          size_t b = s.find_last_not_of(" \t");
          s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
        };
        trim(key);
        trim(value);
        t.meta[key] = value;
        continue;
      }
      std::vector<std::string> cells;
      size_t start = 0;
      while (true) {
        size_t tab = line.find('\t', start);
        cells.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (!have_columns) {
        t.columns = std::move(cells);
        have_columns = true;
      } else {
        if (cells.size() != t.columns.size())
          throw DataError(what + ": line " + std::to_string(lineno) + " has " +
                          std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(t.columns.size()));
        t.rows.push_back(std::move(cells));
      }
    }
    if (!have_columns) throw DataError(what + ": no column header found");
    return t;
  }

  static Table read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return parse(in, path);
  }
};

}  // namespace gevkrig

#endif
