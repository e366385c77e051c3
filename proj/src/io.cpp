#include "fabcr/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <json.hpp>
#include <ostream>
#include <stdexcept>

namespace fabcr::io {

using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(IntervalRec, lo, hi)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PValuePoint, theta0, pvalue)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RegionRecord, prior, sigma, y, alpha, focal, intervals, width, disconnected, z_lo,
                                   z_hi, pvalue_curve)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NefRecord, family, y, alpha, eta_hat, theta_hat, focal_member, components,
                                   intervals, members)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LimitsRecord, prior, sigma, alpha, c_alpha, plus_infinity, minus_infinity,
                                   focal_drift, width, z_width)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CoefRow, coef, mle, focal, lo, hi, z_lo, z_hi, width_ratio, disconnected)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RegressRecord, prior, alpha, sigma2, sigma2_estimated, coverage_approximate, n, p,
                                   rows)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SimCellRow, prior, log_sigma_beta, mean_width, se_width, coverage, se_coverage)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SimulateRecord, n, p, alpha, reps, seed, cells)

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

namespace {

// nlohmann prints the shortest round-trip form; this writer keeps 17
// significant digits for every float.
void emit(std::string& out, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        emit(out, it.value(), indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ", ";
        first = false;
        emit(out, v, indent, depth + 1);
      }
      out += "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? fmt::format("{:.17g}", x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

template <class R>
std::string wrap(const char* schema, const R& r) {
  json j = r;
  j["schema"] = schema;
  j["version"] = kSchemaVersion;
  std::string out;
  emit(out, j, 2, 0);
  out += '\n';
  return out;
}

template <class R>
R unwrap(const char* schema, std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<std::string>() != schema)
      throw std::invalid_argument(fmt::format("expected schema {}, got {}", schema, j.at("schema").get<std::string>()));
    if (j.at("version").get<int>() != kSchemaVersion)
      throw std::invalid_argument(fmt::format("unsupported {} version {}", schema, j.at("version").get<int>()));
    return j.get<R>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("malformed {} record: {}", schema, e.what()));
  }
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_json(const RegionRecord& r) { return wrap("fabcr.region", r); }
std::string to_json(const NefRecord& r) { return wrap("fabcr.nef", r); }
std::string to_json(const LimitsRecord& r) { return wrap("fabcr.limits", r); }
std::string to_json(const RegressRecord& r) { return wrap("fabcr.regress", r); }
std::string to_json(const SimulateRecord& r) { return wrap("fabcr.simulate", r); }

RegionRecord parse_region(std::string_view s) { return unwrap<RegionRecord>("fabcr.region", s); }
NefRecord parse_nef(std::string_view s) { return unwrap<NefRecord>("fabcr.nef", s); }
LimitsRecord parse_limits(std::string_view s) { return unwrap<LimitsRecord>("fabcr.limits", s); }
RegressRecord parse_regress(std::string_view s) { return unwrap<RegressRecord>("fabcr.regress", s); }
SimulateRecord parse_simulate(std::string_view s) { return unwrap<SimulateRecord>("fabcr.simulate", s); }

void write_csv(std::ostream& out, const RegionRecord& r) {
  out << "prior,sigma,y,alpha,component,lo,hi,focal,width,z_lo,z_hi,disconnected\n";
  for (std::size_t k = 0; k < r.intervals.size(); ++k) {
    out << quote(r.prior) << ',' << num(r.sigma) << ',' << num(r.y) << ',' << num(r.alpha) << ',' << k << ','
        << num(r.intervals[k].lo) << ',' << num(r.intervals[k].hi) << ',' << num(r.focal) << ',' << num(r.width)
        << ',' << num(r.z_lo) << ',' << num(r.z_hi) << ',' << (r.disconnected ? 1 : 0) << '\n';
  }
}

void write_csv(std::ostream& out, const NefRecord& r) {
  std::string y;
  for (std::size_t i = 0; i < r.y.size(); ++i) y += (i ? "|" : "") + std::to_string(r.y[i]);
  std::string th;
  for (std::size_t i = 0; i < r.theta_hat.size(); ++i) th += (i ? "|" : "") + num(r.theta_hat[i]);
  out << "family,y,alpha,theta_hat,focal_member,components,component,lo,hi\n";
  const auto head = quote(r.family) + "," + y + "," + num(r.alpha) + "," + th + "," +
                    (r.focal_member ? "1" : "0") + "," + std::to_string(r.components);
  if (r.intervals.empty()) {
    out << head << ",,,\n";
    return;
  }
  for (std::size_t k = 0; k < r.intervals.size(); ++k)
    out << head << ',' << k << ',' << num(r.intervals[k].lo) << ',' << num(r.intervals[k].hi) << '\n';
}

void write_csv(std::ostream& out, const LimitsRecord& r) {
  out << "prior,sigma,alpha,c_alpha,direction,lo_offset,hi_offset,width,z_width,focal_drift\n";
  const auto row = [&](const char* dir, const IntervalRec& iv) {
    out << quote(r.prior) << ',' << num(r.sigma) << ',' << num(r.alpha) << ',' << num(r.c_alpha) << ',' << dir << ','
        << num(iv.lo) << ',' << num(iv.hi) << ',' << num(r.width) << ',' << num(r.z_width) << ','
        << num(r.focal_drift) << '\n';
  };
  row("+inf", r.plus_infinity);
  row("-inf", r.minus_infinity);
}

void write_csv(std::ostream& out, const RegressRecord& r) {
  out << "coef,mle,focal,lo,hi,z_lo,z_hi,width_ratio,disconnected\n";
  for (const CoefRow& c : r.rows) {
    out << quote(c.coef) << ',' << num(c.mle) << ',' << num(c.focal) << ',' << num(c.lo) << ',' << num(c.hi) << ','
        << num(c.z_lo) << ',' << num(c.z_hi) << ',' << num(c.width_ratio) << ',' << (c.disconnected ? 1 : 0) << '\n';
  }
}

void write_csv(std::ostream& out, const SimulateRecord& r) {
  out << "prior,log_sigma_beta,mean_width,se_width,coverage,se_coverage\n";
  for (const SimCellRow& c : r.cells) {
    out << quote(c.prior) << ',' << num(c.log_sigma_beta) << ',' << num(c.mean_width) << ',' << num(c.se_width)
        << ',' << num(c.coverage) << ',' << num(c.se_coverage) << '\n';
  }
}

void write_pvalue_csv(std::ostream& out, const std::vector<PValuePoint>& curve) {
  out << "theta0,pvalue\n";
  for (const PValuePoint& pt : curve) out << num(pt.theta0) << ',' << num(pt.pvalue) << '\n';
}

void write_grid_csv(std::ostream& out, const std::vector<std::vector<double>>& grid, const std::vector<char>& member) {
  const std::size_t k = grid.empty() ? 1 : grid.front().size();
  if (k == 1) {
    out << "theta";
  } else {
    for (std::size_t j = 0; j < k; ++j) out << (j ? "," : "") << "theta" << j + 1;
  }
  out << ",member\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid[i].size(); ++j) out << (j ? "," : "") << num(grid[i][j]);
    out << ',' << (member[i] ? 1 : 0) << '\n';
  }
}

}  // namespace fabcr::io
