#include "fabcr/csv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace fabcr {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_cell(const std::string& cell, std::size_t line_no) {
  if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw std::invalid_argument(fmt::format("csv line {}: '{}' is not a number", line_no, cell));
  return v;
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + mid));
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != t.header.size())
      throw std::invalid_argument(
          fmt::format("csv line {}: {} fields, header has {}", line_no, cells.size(), t.header.size()));
    std::vector<std::optional<double>> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, line_no));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw std::invalid_argument("csv: empty input");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return read_csv(in);
}

Design build_design(const CsvTable& table, const DesignOptions& opts) {
  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw std::invalid_argument("csv: no column named '" + name + "'");
    return static_cast<std::size_t>(it - table.header.begin());
  };
  const std::size_t ycol = column(opts.response);
  std::vector<std::size_t> cols;
  std::vector<std::string> names;
  if (opts.covariates.empty()) {
    for (std::size_t j = 0; j < table.header.size(); ++j)
      if (j != ycol) {
        cols.push_back(j);
        names.push_back(table.header[j]);
      }
  } else {
    for (const auto& c : opts.covariates) {
      cols.push_back(column(c));
      names.push_back(c);
    }
  }
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto p = static_cast<Eigen::Index>(cols.size());
  Design d;
  d.Y.resize(n);
  d.X.resize(n, p + (opts.intercept ? 1 : 0));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& cell = table.rows[i][ycol];
    if (!cell) throw std::invalid_argument(fmt::format("csv row {}: response is missing", i + 1));
    d.Y(i) = *cell;
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    std::vector<double> present;
    for (Eigen::Index i = 0; i < n; ++i)
      if (const auto& c = table.rows[i][cols[j]]) present.push_back(*c);
    if (present.size() < static_cast<std::size_t>(n) && !opts.impute_median)
      throw std::invalid_argument("csv column '" + names[j] + "' has missing values (use median imputation)");
    if (present.empty()) throw std::invalid_argument("csv column '" + names[j] + "' is entirely missing");
    const double fill = present.size() < static_cast<std::size_t>(n) ? median(present) : 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& c = table.rows[i][cols[j]];
      d.X(i, j) = c ? *c : fill;
    }
    if (opts.standardize) {
      const double mean = d.X.col(j).mean();
      const double sd = std::sqrt((d.X.col(j).array() - mean).square().sum() / static_cast<double>(n - 1));
      if (!(sd > 0.0)) throw std::invalid_argument("csv column '" + names[j] + "' is constant");
      d.X.col(j) = (d.X.col(j).array() - mean) / sd;
    }
  }
  if (opts.intercept) {
    d.X.col(p).setOnes();
    names.push_back("(intercept)");
  }
  d.names = std::move(names);
  return d;
}

}  // namespace fabcr
