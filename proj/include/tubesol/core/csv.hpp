#pragma once

// Minimal CSV reading/writing for fixtures and run artifacts.

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "tubesol/core/error.hpp"

namespace tubesol::csv {

struct Table {
  std::vector<std::string> comments;  ///< lines starting with '#', without the marker
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return int(i);
    fail(ErrorKind::IoError, "missing CSV column '" + name + "'");
  }
};

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

/// Round-trip exact formatting of doubles.
inline std::string format(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline Table parse(std::istream& in) {
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      t.comments.push_back(line.substr(line.find_first_not_of("# ")));
      continue;
    }
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split(line)) {
      double v = 0.0;
      const char* b = cell.data();
      auto [ptr, ec] = std::from_chars(b, b + cell.size(), v);
      if (ec != std::errc() || ptr != b + cell.size())
        fail(ErrorKind::IoError, "non-numeric CSV cell '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.header.size()) fail(ErrorKind::IoError, "CSV row width mismatch");
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table read(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  return parse(in);
}

inline void write(std::ostream& out, const Table& t) {
  for (const auto& c : t.comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format(row[i]);
    out << '\n';
  }
}

inline void write(const std::string& path, const Table& t) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path);
  write(out, t);
}

}  // namespace tubesol::csv
