#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "skewgof/errors.hpp"
#include "skewgof/sample.hpp"

// CSV dialect: comma separator, '.' decimal point, UTF-8, optional header
// detected by a non-numeric first row.  Cells may be wrapped in double
// quotes (as R's write.csv does).  Empty cells and the tokens NA/NaN/nan
// count as missing.

namespace skewgof {

struct RawCsv {
  std::vector<std::string> header;             // empty when the file has none
  std::vector<std::vector<std::string>> rows;  // unquoted raw cells
  std::size_t header_lines = 0;                // 1 when a header was detected
};

namespace detail {

inline std::string strip_quotes(std::string s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
      cur.push_back(ch);
    } else if (ch == ',' && !quoted) {
      out.push_back(strip_quotes(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(strip_quotes(cur));
  return out;
}

inline bool csv_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "na";
}

inline bool csv_numeric(const std::string& cell, double* value) {
  if (cell.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') return false;
  if (value) *value = v;
  return true;
}

}  // namespace detail

inline RawCsv read_csv_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path);
  RawCsv out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = detail::split_csv_line(line);
    if (first) {
      first = false;
      // header iff some cell is neither numeric nor a missing marker
      bool header = false;
      for (const auto& c : cells)
        if (!detail::csv_missing(c) && !detail::csv_numeric(c, nullptr)) header = true;
      if (header) {
        out.header = cells;
        out.header_lines = 1;
        continue;
      }
    }
    out.rows.push_back(std::move(cells));
  }
  return out;
}

struct NumericCsv {
  Sample data;
  std::vector<std::string> names;  // resolved column names (or #k placeholders)
  std::size_t dropped = 0;         // rows removed for missing values
};

// Resolve one column selector: a header name, or a 1-based index.
inline std::size_t resolve_column(const RawCsv& raw, const std::string& sel, std::size_t width) {
  for (std::size_t j = 0; j < raw.header.size(); ++j)
    if (raw.header[j] == sel) return j;
  char* end = nullptr;
  long idx = std::strtol(sel.c_str(), &end, 10);
  if (end != sel.c_str() && *end == '\0' && idx >= 1 && static_cast<std::size_t>(idx) <= width)
    return static_cast<std::size_t>(idx - 1);
  throw data_error("column selector '" + sel + "' matches no header name or 1-based index");
}

// Extract a numeric matrix.  `columns` empty selects every column; rows with
// missing cells are dropped (and counted) when drop_missing, otherwise they
// raise data_error with the offending row and column.  Non-numeric cells in a
// selected column always raise data_error.
inline NumericCsv csv_to_sample(const RawCsv& raw, const std::vector<std::string>& columns,
                                bool drop_missing) {
  if (raw.rows.empty()) throw data_error("no data rows");
  const std::size_t width = raw.rows.front().size();
  std::vector<std::size_t> sel;
  NumericCsv out;
  if (columns.empty()) {
    for (std::size_t j = 0; j < width; ++j) sel.push_back(j);
  } else {
    for (const auto& c : columns) sel.push_back(resolve_column(raw, c, width));
  }
  for (std::size_t j : sel)
    out.names.push_back(j < raw.header.size() ? raw.header[j] : "#" + std::to_string(j + 1));

  std::vector<double> vals;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    const auto& row = raw.rows[i];
    const std::size_t line_no = i + 1 + raw.header_lines;  // 1-based file line
    if (row.size() != width)
      throw data_error("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(width) + " cells, got " + std::to_string(row.size()));
    bool missing = false;
    std::vector<double> rowvals(sel.size());
    for (std::size_t k = 0; k < sel.size(); ++k) {
      const std::string& cell = row[sel[k]];
      if (detail::csv_missing(cell)) {
        if (!drop_missing)
          throw data_error("line " + std::to_string(line_no) + ", column " + out.names[k] +
                           ": missing value (rerun with --drop-missing to skip such rows)");
        missing = true;
        break;
      }
      double v;
      if (!detail::csv_numeric(cell, &v))
        throw data_error("line " + std::to_string(line_no) + ", column " + out.names[k] +
                         ": non-numeric cell '" + cell + "'");
      rowvals[k] = v;
    }
    if (missing) {
      ++out.dropped;
      continue;
    }
    vals.insert(vals.end(), rowvals.begin(), rowvals.end());
    ++kept;
  }
  if (kept == 0) throw data_error("all rows dropped or missing");
  out.data = Sample(kept, sel.size());
  for (std::size_t i = 0; i < kept; ++i)
    for (std::size_t j = 0; j < sel.size(); ++j) out.data(i, j) = vals[i * sel.size() + j];
  return out;
}

inline NumericCsv read_csv(const std::string& path, const std::vector<std::string>& columns = {},
                           bool drop_missing = false) {
  return csv_to_sample(read_csv_raw(path), columns, drop_missing);
}

// 17 significant digits: doubles round-trip exactly.
inline void write_csv(std::ostream& out, const Sample& x,
                      const std::vector<std::string>& header = {}) {
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j)
      out << (j ? "," : "") << header[j];
    out << "\n";
  }
  char buf[40];
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t j = 0; j < x.p(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", x(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

inline void write_csv(const std::string& path, const Sample& x,
                      const std::vector<std::string>& header = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);
  write_csv(out, x, header);
  if (!out) throw data_error("short write to " + path);
}

}  // namespace skewgof
