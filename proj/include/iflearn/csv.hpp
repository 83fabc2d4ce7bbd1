#pragma once

// Minimal CSV reading and writing. Parsing is locale independent: numbers are
// read with std::from_chars and written with std::to_chars.

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "iflearn/data.hpp"
#include "iflearn/error.hpp"

namespace iflearn {

/// Which CSV columns hold covariates, outcome and (optionally) treatment.
struct ColumnMap {
  std::vector<std::string> covariates;
  std::string outcome;
  std::optional<std::string> treatment;
};

namespace csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

/// Parses a whole cell as a double; nullopt if the cell is not a number.
inline std::optional<double> parse_double(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

/// Shortest text that reads back to exactly `value` at 17 significant digits.
inline std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc()) fail(ErrorKind::io, "failed to format number");
  return std::string(buf, ptr);
}

/// A header plus numeric body, as read from disk.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return j;
    }
    return std::nullopt;
  }

  std::size_t require_column(std::string_view name, std::string_view what) const {
    const auto j = column(name);
    if (!j) {
      fail(ErrorKind::schema, std::string(what) + " column '" + std::string(name) + "' not found in header");
    }
    return *j;
  }
};

/// Reads a CSV whose cells are all numeric. Rows with the wrong number of
/// cells or unparsable cells are reported with their data-row index.
inline Table read_table(std::istream& in, std::string_view source = "<stream>") {
  Table table;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!have_header) {
      for (const auto c : cells) table.header.emplace_back(c);
      have_header = true;
      continue;
    }
    const std::size_t row = table.rows.size();
    if (cells.size() != table.header.size()) {
      fail(ErrorKind::parse, std::string(source) + ": data row " + std::to_string(row) + " (line " +
                                 std::to_string(line_no) + ") has " + std::to_string(cells.size()) +
                                 " cells, header has " + std::to_string(table.header.size()));
    }
    std::vector<double> values;
    values.reserve(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto v = parse_double(cells[j]);
      if (!v) {
        fail(ErrorKind::parse, std::string(source) + ": data row " + std::to_string(row) + " (line " +
                                   std::to_string(line_no) + "), column '" + table.header[j] +
                                   "': '" + std::string(cells[j]) + "' is not a number");
      }
      values.push_back(*v);
    }
    table.rows.push_back(std::move(values));
  }
  if (!have_header) fail(ErrorKind::parse, std::string(source) + ": missing header row");
  return table;
}

inline Table read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  return read_table(in, path);
}

/// Extracts the mapped covariate columns of a table as an n x d matrix.
inline Matrix covariate_matrix(const Table& table, const std::vector<std::string>& names) {
  if (names.empty()) fail(ErrorKind::config, "no covariate columns configured");
  std::vector<std::size_t> idx;
  for (const auto& name : names) idx.push_back(table.require_column(name, "covariate"));
  Matrix m(table.rows.size(), names.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const double v = table.rows[i][idx[j]];
      if (!std::isfinite(v)) {
        fail(ErrorKind::domain, "non-finite value in column '" + names[j] + "' at data row " + std::to_string(i));
      }
      m(i, j) = v;
    }
  }
  return m;
}

}  // namespace csv

inline Dataset dataset_from_table(const csv::Table& table, const ColumnMap& columns) {
  if (columns.covariates.empty()) fail(ErrorKind::config, "no covariate columns configured");
  std::vector<std::size_t> xcols;
  for (const auto& name : columns.covariates) xcols.push_back(table.require_column(name, "covariate"));
  const std::size_t ycol = table.require_column(columns.outcome, "outcome");
  std::optional<std::size_t> wcol;
  if (columns.treatment) wcol = table.require_column(*columns.treatment, "treatment");
  if (table.rows.empty()) fail(ErrorKind::empty_dataset, "file has a header but no data rows");

  const std::size_t n = table.rows.size();
  const std::size_t d = xcols.size();
  std::vector<double> x;
  std::vector<double> y;
  std::vector<int> w;
  x.reserve(n * d);
  y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = table.rows[i];
    for (const std::size_t j : xcols) {
      if (!std::isfinite(r[j])) {
        fail(ErrorKind::domain, "non-finite covariate '" + table.header[j] + "' at data row " + std::to_string(i));
      }
      x.push_back(r[j]);
    }
    if (!std::isfinite(r[ycol])) fail(ErrorKind::domain, "non-finite outcome at data row " + std::to_string(i));
    y.push_back(r[ycol]);
    if (wcol) {
      const double v = r[*wcol];
      if (v != 0.0 && v != 1.0) {
        fail(ErrorKind::domain, "treatment column '" + *columns.treatment + "' has value " +
                                    csv::format_double(v) + " at data row " + std::to_string(i) +
                                    "; expected 0 or 1");
      }
      w.push_back(static_cast<int>(v));
    }
  }
  if (wcol) return Dataset(d, std::move(x), std::move(y), std::move(w));
  return Dataset(d, std::move(x), std::move(y));
}

/// Reads a dataset from a CSV file with a header row.
inline Dataset load_csv(const std::string& path, const ColumnMap& columns) {
  return dataset_from_table(csv::read_table_file(path), columns);
}

}  // namespace iflearn
