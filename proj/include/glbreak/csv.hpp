#pragma once

// CSV ingestion and export.
//
// Input: header `y,w1,...,wp,z1,...,zq`, one time-ordered observation per row.

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "glbreak/errors.hpp"
#include "glbreak/model.hpp"

namespace glbreak {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

}  // namespace detail

/// Parses regression data; InvalidData errors carry the 1-based line number.
inline RegressionData read_regression_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::InvalidData, "line 1: missing header");
  const auto header = detail::split_csv_line(line);
  std::vector<int> w_cols, z_cols;
  if (header.empty() || detail::trim(header[0]) != "y") fail(ErrorCode::InvalidData, "line 1: first column must be 'y'");
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string name = detail::trim(header[c]);
    if (!name.empty() && name[0] == 'w') {
      if (!z_cols.empty()) fail(ErrorCode::InvalidData, "line 1: w columns must precede z columns");
      w_cols.push_back(static_cast<int>(c));
    } else if (!name.empty() && name[0] == 'z') {
      z_cols.push_back(static_cast<int>(c));
    } else {
      fail(ErrorCode::InvalidData, "line 1: unexpected column '" + name + "'");
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      fail(ErrorCode::InvalidData, "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                                       " fields, found " + std::to_string(fields.size()));
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      if (!detail::parse_double(fields[c], row[c]))
        fail(ErrorCode::InvalidData, "line " + std::to_string(line_no) + ": cannot parse '" + fields[c] + "'");
    rows.push_back(std::move(row));
  }

  const Index T = static_cast<Index>(rows.size());
  Vector y(T);
  Matrix W(T, static_cast<Index>(w_cols.size()));
  Matrix Z(T, static_cast<Index>(z_cols.size()));
  for (Index t = 0; t < T; ++t) {
    y(t) = rows[t][0];
    for (std::size_t k = 0; k < w_cols.size(); ++k) W(t, static_cast<Index>(k)) = rows[t][w_cols[k]];
    for (std::size_t k = 0; k < z_cols.size(); ++k) Z(t, static_cast<Index>(k)) = rows[t][z_cols[k]];
  }
  return RegressionData(std::move(y), std::move(W), std::move(Z));
}

inline RegressionData read_regression_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidData, "cannot open " + path);
  return read_regression_csv(in);
}

inline void write_regression_csv(std::ostream& out, const RegressionData& data) {
  out << "y";
  for (Index k = 0; k < data.p(); ++k) out << ",w" << k + 1;
  for (Index k = 0; k < data.q(); ++k) out << ",z" << k + 1;
  out << '\n' << std::setprecision(17);
  for (Index t = 0; t < data.T(); ++t) {
    out << data.y()(t);
    for (Index k = 0; k < data.p(); ++k) out << ',' << data.W()(t, k);
    for (Index k = 0; k < data.q(); ++k) out << ',' << data.Z()(t, k);
    out << '\n';
  }
}

}  // namespace glbreak
