#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fabcr {

/// Numeric table; empty, "NA" and "NaN" cells are missing.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

struct DesignOptions {
  std::string response;
  /// Empty: every column except the response.
  std::vector<std::string> covariates;
  bool impute_median = false;
  bool standardize = false;
  bool intercept = false;
};

struct Design {
  Eigen::MatrixXd X;
  Eigen::VectorXd Y;
  std::vector<std::string> names;
};

/// Builds X and Y. Missing covariates are imputed by the column median
/// (before standardizing) when requested, otherwise they are an error, as is
/// a missing response.
Design build_design(const CsvTable& table, const DesignOptions& opts);

}  // namespace fabcr
