#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fabcr::io {

/// Bumped whenever a record gains, loses or renames a field.
inline constexpr int kSchemaVersion = 1;

struct IntervalRec {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const IntervalRec&) const = default;
};

struct PValuePoint {
  double theta0 = 0.0;
  double pvalue = 0.0;
  bool operator==(const PValuePoint&) const = default;
};

struct RegionRecord {
  std::string prior;
  double sigma = 0.0;
  double y = 0.0;
  double alpha = 0.0;
  double focal = 0.0;
  std::vector<IntervalRec> intervals;
  double width = 0.0;
  bool disconnected = false;
  double z_lo = 0.0;
  double z_hi = 0.0;
  std::vector<PValuePoint> pvalue_curve;
  bool operator==(const RegionRecord&) const = default;
};

struct NefRecord {
  std::string family;
  std::vector<int> y;
  double alpha = 0.0;
  std::vector<double> eta_hat;
  std::vector<double> theta_hat;
  bool focal_member = false;
  int components = 0;
  /// Scalar families only.
  std::vector<IntervalRec> intervals;
  /// Grid points (θ coordinates) in the region; multinomial only.
  std::vector<std::vector<double>> members;
  bool operator==(const NefRecord&) const = default;
};

struct LimitsRecord {
  std::string prior;
  double sigma = 0.0;
  double alpha = 0.0;
  double c_alpha = 0.0;
  /// Offsets of C_α(y) - y as y → +∞ and y → -∞.
  IntervalRec plus_infinity;
  IntervalRec minus_infinity;
  double focal_drift = 0.0;
  double width = 0.0;
  double z_width = 0.0;
  bool operator==(const LimitsRecord&) const = default;
};

struct CoefRow {
  std::string coef;
  double mle = 0.0;
  double focal = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double z_lo = 0.0;
  double z_hi = 0.0;
  double width_ratio = 0.0;
  bool disconnected = false;
  bool operator==(const CoefRow&) const = default;
};

struct RegressRecord {
  std::string prior;
  double alpha = 0.0;
  double sigma2 = 0.0;
  bool sigma2_estimated = false;
  /// Estimated σ² makes coverage approximate.
  bool coverage_approximate = false;
  int n = 0;
  int p = 0;
  std::vector<CoefRow> rows;
  bool operator==(const RegressRecord&) const = default;
};

struct SimCellRow {
  std::string prior;
  double log_sigma_beta = 0.0;
  double mean_width = 0.0;
  double se_width = 0.0;
  double coverage = 0.0;
  double se_coverage = 0.0;
  bool operator==(const SimCellRow&) const = default;
};

struct SimulateRecord {
  int n = 0;
  int p = 0;
  double alpha = 0.0;
  int reps = 0;
  std::string seed;  // decimal; JSON numbers are doubles for some readers
  std::vector<SimCellRow> cells;
  bool operator==(const SimulateRecord&) const = default;
};

std::string to_json(const RegionRecord& r);
std::string to_json(const NefRecord& r);
std::string to_json(const LimitsRecord& r);
std::string to_json(const RegressRecord& r);
std::string to_json(const SimulateRecord& r);

/// Each parser checks the schema name and version and throws
/// std::invalid_argument on mismatch or malformed input.
RegionRecord parse_region(std::string_view json);
NefRecord parse_nef(std::string_view json);
LimitsRecord parse_limits(std::string_view json);
RegressRecord parse_regress(std::string_view json);
SimulateRecord parse_simulate(std::string_view json);

/// Tidy CSV with a header row; doubles are written with 17 significant digits.
void write_csv(std::ostream& out, const RegionRecord& r);
void write_csv(std::ostream& out, const NefRecord& r);
void write_csv(std::ostream& out, const LimitsRecord& r);
void write_csv(std::ostream& out, const RegressRecord& r);
void write_csv(std::ostream& out, const SimulateRecord& r);
/// theta0,pvalue
void write_pvalue_csv(std::ostream& out, const std::vector<PValuePoint>& curve);
/// theta,member rows (theta1..thetak for the multinomial).
void write_grid_csv(std::ostream& out, const std::vector<std::vector<double>>& grid, const std::vector<char>& member);

/// "{:.17g}"
std::string num(double x);

}  // namespace fabcr::io
