#ifndef BMR_IO_CSV_HPP
#define BMR_IO_CSV_HPP

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <Eigen/Dense>

#include "bmr/core/dataset.hpp"
#include "bmr/core/errors.hpp"

namespace bmr::io {

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
  if (s == "nan" || s == "NaN") {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  if (s == "inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  if (s == "-inf") {
    out = -std::numeric_limits<double>::infinity();
    return true;
  }
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Rows of raw cells with the header. Row numbers in messages are file
/// lines (the header is line 1).
struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // file line of each row

  std::size_t index(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    throw InputError("missing column '" + name + "'");
  }
};

inline TextTable read_text_table(std::istream& in, const std::string& source) {
  TextTable t;
  std::string line;
  if (!std::getline(in, line)) throw InputError(source + ": empty file");
  for (auto cell : split_row(line)) t.header.emplace_back(cell);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != t.header.size()) {
      throw InputError(source + ": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.emplace_back(cells.begin(), cells.end());
    t.lines.push_back(line_no);
  }
  return t;
}

/// Numeric table: every cell must parse as a number.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> lines;

  std::size_t index(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    throw InputError("missing column '" + name + "'");
  }
};

inline double cell_number(const TextTable& t, std::size_t row, std::size_t col, const std::string& source) {
  double v;
  if (!parse_double(t.rows[row][col], v)) {
    throw InputError(source + ": row " + std::to_string(t.lines[row]) + ", column " + t.header[col] +
                     ": not a number: '" + t.rows[row][col] + "'");
  }
  return v;
}

inline Table read_table(std::istream& in, const std::string& source) {
  TextTable text = read_text_table(in, source);
  Table t;
  t.header = text.header;
  t.lines = text.lines;
  for (std::size_t r = 0; r < text.rows.size(); ++r) {
    std::vector<double> row(text.header.size());
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = cell_number(text, r, k, source);
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_table(in, path);
}

struct DatasetRead {
  MRDataset data;
  std::vector<std::string> warnings;
};

/// Dataset CSV: header row with columns x, y, optional w and z1..zJ, in any
/// order. When keep_covariate is false a w column is dropped with a warning.
/// Row numbers in messages are file lines (the header is line 1).
inline DatasetRead read_dataset(std::istream& in, const std::string& source, bool keep_covariate) {
  const Table t = read_table(in, source);
  std::map<std::size_t, std::size_t> z_columns;  // instrument number -> column
  std::optional<std::size_t> xc, yc, wc;
  for (std::size_t k = 0; k < t.header.size(); ++k) {
    const std::string& h = t.header[k];
    auto once = [&](std::optional<std::size_t>& slot) {
      if (slot) throw InputError(source + ": duplicate column '" + h + "'");
      slot = k;
    };
    if (h == "x") {
      once(xc);
    } else if (h == "y") {
      once(yc);
    } else if (h == "w") {
      once(wc);
    } else if (h.size() > 1 && h[0] == 'z' && h.find_first_not_of("0123456789", 1) == std::string::npos &&
               h[1] != '0') {
      const std::size_t num = std::stoul(h.substr(1));
      if (!z_columns.emplace(num, k).second) throw InputError(source + ": duplicate column '" + h + "'");
    } else {
      throw InputError(source + ": unknown column '" + h + "' (expected x, y, w, z1..zJ)");
    }
  }
  if (!xc || !yc) throw InputError(source + ": columns 'x' and 'y' are required");
  if (z_columns.empty()) throw InputError(source + ": no instrument columns z1..zJ");
  if (z_columns.rbegin()->first != z_columns.size()) {
    throw InputError(source + ": instrument columns must be z1..zJ without gaps");
  }

  DatasetRead out;
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  const auto j = static_cast<Eigen::Index>(z_columns.size());
  MRDataset& d = out.data;
  d.genotypes.resize(n, j);
  d.exposure.resize(n);
  d.outcome.resize(n);
  if (wc && keep_covariate) d.covariate = Eigen::VectorXd(n);
  if (wc && !keep_covariate) out.warnings.push_back("column 'w' ignored: interaction model is disabled");
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    const std::string where = source + ": row " + std::to_string(t.lines[static_cast<std::size_t>(i)]);
    d.exposure[i] = row[*xc];
    d.outcome[i] = row[*yc];
    if (!std::isfinite(d.exposure[i])) throw InputError(where + ", column x: value must be finite");
    if (!std::isfinite(d.outcome[i])) throw InputError(where + ", column y: value must be finite");
    for (const auto& [num, col] : z_columns) {
      const double g = row[col];
      if (!(g == 0.0 || g == 1.0 || g == 2.0)) {
        throw InputError(where + ", column z" + std::to_string(num) + ": genotype must be 0, 1 or 2, got " +
                         format_double(g));
      }
      d.genotypes(i, static_cast<Eigen::Index>(num - 1)) = g;
    }
    if (d.covariate) {
      const double w = row[*wc];
      if (!(w == 0.0 || w == 1.0)) throw InputError(where + ", column w: covariate must be 0 or 1");
      (*d.covariate)[i] = w;
    }
  }
  d.validate();
  return out;
}

inline DatasetRead read_dataset(const std::string& path, bool keep_covariate) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset " + path);
  return read_dataset(in, path, keep_covariate);
}

inline void write_dataset(std::ostream& out, const MRDataset& d) {
  out << "x,y";
  if (d.covariate) out << ",w";
  for (std::size_t k = 1; k <= d.j(); ++k) out << ",z" << k;
  out << '\n';
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d.n()); ++i) {
    out << format_double(d.exposure[i]) << ',' << format_double(d.outcome[i]);
    if (d.covariate) out << ',' << format_double((*d.covariate)[i]);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(d.j()); ++k) {
      out << ',' << static_cast<int>(d.genotypes(i, k));
    }
    out << '\n';
  }
}

}  // namespace bmr::io

#endif  // BMR_IO_CSV_HPP
