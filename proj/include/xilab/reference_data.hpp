#ifndef XILAB_REFERENCE_DATA_HPP
#define XILAB_REFERENCE_DATA_HPP

// The published table of the first zeros of xi^(-1) in the first quadrant,
// with the averaged pairs of zeta-zero ordinates printed next to them.
// The CSV is compiled in (see table1_embedded.hpp) and checked for internal
// consistency: |rho| against hypot(Re, Im) and gamma_tilde against the mean
// of its pair, both up to the rounding of 5-decimal inputs.

#include "xilab/precision.hpp"
#include "xilab/table1_embedded.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace xilab {

struct Table1Row {
  int k = 0;
  double rho_re = 0;
  double rho_im = 0;
  double rho_abs = 0;
  std::optional<double> gamma_tilde;
  std::optional<double> gamma_odd;
  std::optional<double> gamma_even;
};

struct FixtureIssue {
  int k = 0;
  std::string column;
  double printed = 0;
  double derived = 0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_cell(const std::string& cell, int line_no) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size())
    throw Error("table1 fixture: bad number '" + cell + "' on line " +
                std::to_string(line_no));
  return v;
}

}  // namespace detail

// Parses the k,rho_re,rho_im,rho_abs,gamma_tilde,gamma_odd,gamma_even layout.
inline std::vector<Table1Row> parse_table1_csv(std::string_view text) {
  static const char* kHeader =
      "k,rho_re,rho_im,rho_abs,gamma_tilde,gamma_odd,gamma_even";
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<Table1Row> rows;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kHeader) throw Error("table1 fixture: unexpected header");
      continue;
    }
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 7)
      throw Error("table1 fixture: expected 7 columns on line " +
                  std::to_string(line_no));
    Table1Row r;
    r.k = static_cast<int>(detail::parse_cell(cells[0], line_no));
    r.rho_re = detail::parse_cell(cells[1], line_no);
    r.rho_im = detail::parse_cell(cells[2], line_no);
    r.rho_abs = detail::parse_cell(cells[3], line_no);
    if (!cells[4].empty()) r.gamma_tilde = detail::parse_cell(cells[4], line_no);
    if (!cells[5].empty()) r.gamma_odd = detail::parse_cell(cells[5], line_no);
    if (!cells[6].empty()) r.gamma_even = detail::parse_cell(cells[6], line_no);
    rows.push_back(r);
  }
  if (rows.empty()) throw Error("table1 fixture: no rows");
  return rows;
}

inline std::vector<Table1Row> load_table1_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open fixture " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_table1_csv(ss.str());
}

// Rows k = 0..20 as printed.
inline const std::vector<Table1Row>& table1_zeros() {
  static const std::vector<Table1Row> rows =
      parse_table1_csv(embedded::kTable1Csv);
  return rows;
}

inline const char* table1_sha256() { return embedded::kTable1Sha256; }

// gamma_1 .. gamma_40 in order.
inline std::vector<double> zeta_zero_ordinates(
    const std::vector<Table1Row>& rows = table1_zeros()) {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.gamma_odd) out.push_back(*r.gamma_odd);
    if (r.gamma_even) out.push_back(*r.gamma_even);
  }
  return out;
}

// Rows whose printed |rho| or gamma_tilde cannot come from the printed
// coordinates or ordinates.  Printed coordinates are cut to 5 decimals,
// sometimes truncated rather than rounded, so each may be off by up to one
// unit of the fifth decimal; with the half unit on |rho| itself that bounds
// the modulus gap by (sqrt 2 + 1/2) 1e-5.  Ordinates are rounded, so the
// mean may differ by one unit.
inline std::vector<FixtureIssue> table1_consistency_issues(
    const std::vector<Table1Row>& rows) {
  constexpr double kAbsTol = 2.0e-5;
  constexpr double kMeanTol = 1.0e-5 + 1e-12;
  std::vector<FixtureIssue> issues;
  for (const auto& r : rows) {
    if (r.k == 0) continue;
    const double h = std::hypot(r.rho_re, r.rho_im);
    if (std::abs(h - r.rho_abs) > kAbsTol)
      issues.push_back({r.k, "rho_abs", r.rho_abs, h});
    if (r.gamma_odd && r.gamma_even && r.gamma_tilde) {
      const double mean = (*r.gamma_odd + *r.gamma_even) / 2;
      if (std::abs(mean - *r.gamma_tilde) > kMeanTol)
        issues.push_back({r.k, "gamma_tilde", *r.gamma_tilde, mean});
    } else if (r.gamma_odd || r.gamma_even || r.gamma_tilde) {
      issues.push_back({r.k, "gamma_tilde", r.gamma_tilde.value_or(0), 0});
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].k != static_cast<int>(i))
      issues.push_back({rows[i].k, "k", static_cast<double>(rows[i].k),
                        static_cast<double>(i)});
  }
  return issues;
}

// Mean of a pair of 5-decimal ordinates, rounded half up to 5 decimals.
inline double regenerate_gamma_tilde(double gamma_odd, double gamma_even) {
  const long long a = std::llround(gamma_odd * 1e5);
  const long long b = std::llround(gamma_even * 1e5);
  const long long twice = a + b;
  const long long mean = twice / 2 + (twice % 2 != 0 ? 1 : 0);
  return static_cast<double>(mean) / 1e5;
}

}  // namespace xilab

#endif  // XILAB_REFERENCE_DATA_HPP
