#include "csv.hpp"

#include <charconv>
#include <cstdio>
#include <optional>
#include <vector>

#include "smsn/error.hpp"

namespace smsn::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<std::vector<double>> parse_row(std::string_view line) {
  std::vector<double> row;
  while (true) {
    const auto comma = line.find(',');
    const std::string_view field = trim(line.substr(0, comma));
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() ||
        ptr != field.data() + field.size()) {
      return std::nullopt;
    }
    row.push_back(value);
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return row;
}

}  // namespace

Matrix parse_numeric_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty()) continue;
    auto row = parse_row(line);
    if (!row) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw Error(Errc::parse_error,
                  "non-numeric field on line " + std::to_string(line_no));
    }
    if (!rows.empty() && row->size() != rows.front().size()) {
      throw Error(Errc::parse_error,
                  "ragged row on line " + std::to_string(line_no));
    }
    rows.push_back(std::move(*row));
  }
  if (rows.empty()) throw Error(Errc::parse_error, "no data rows");
  Matrix out(static_cast<Index>(rows.size()),
             static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return out;
}

std::string format_sample_csv(const Matrix& x) {
  std::string out;
  for (Index j = 0; j < x.cols(); ++j) {
    out += (j ? ",x" : "x") + std::to_string(j + 1);
  }
  out += '\n';
  char buf[40];
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", x(i, j));
      if (j) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace smsn::cli
