#ifndef UCBSTAB_REPORT_IO_HPP_
#define UCBSTAB_REPORT_IO_HPP_

// Export formats (schema version 1).
//
// Every file opens with a header carrying the schema version, the config
// hash and the root seed. CSV files carry it as a leading '#' comment line;
// JSON files carry the same fields at the top level.
//
// replications.csv columns:
//   replication,arm,n_aT,mean,var_hat,standardized,in_ci
// stability.csv columns:
//   horizon,arm,n_star,predicted_pulls,ratio_q1,ratio_median,ratio_q3,ratio_iqr
// growing_k.csv columns:
//   horizon,arm_count,n_star,near_optimal_threshold,near_optimal_fraction,
//   max_median_deviation,mean_regret
//
// Reals use the shortest representation that round-trips; undefined values
// are written as "nan" (CSV) or null (JSON).

#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ucbstab/bandit.hpp"
#include "ucbstab/harness.hpp"

namespace ucbstab {

inline constexpr int kReportSchemaVersion = 1;

struct ReportHeader {
  std::uint64_t config_hash = 0;
  std::uint64_t root_seed = 0;
  std::string tool = "ucbstab";
};

inline constexpr const char *kReplicationColumns =
    "replication,arm,n_aT,mean,var_hat,standardized,in_ci";
inline constexpr const char *kStabilityColumns =
    "horizon,arm,n_star,predicted_pulls,ratio_q1,ratio_median,ratio_q3,ratio_iqr";
inline constexpr const char *kGrowingKColumns =
    "horizon,arm_count,n_star,near_optimal_threshold,near_optimal_fraction,"
    "max_median_deviation,mean_regret";

/// Zero-padded 16-digit lowercase hex.
inline std::string hash_hex(std::uint64_t h) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = kDigits[h & 0xf];
  return s;
}

namespace io_detail {

inline std::string csv_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return detail::format_real(x);
}

inline nlohmann::json json_real(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

inline nlohmann::json json_reals(const std::vector<double> &xs) {
  auto arr = nlohmann::json::array();
  for (double x : xs) arr.push_back(json_real(x));
  return arr;
}

}  // namespace io_detail

inline void write_csv_header(std::ostream &os, const ReportHeader &header) {
  os << "# " << header.tool << "-report schema_version=" << kReportSchemaVersion
     << " config_hash=" << hash_hex(header.config_hash)
     << " root_seed=" << header.root_seed << "\n";
}

inline void write_replications_csv(std::ostream &os, const ExperimentReport &report,
                                   const ReportHeader &header) {
  using io_detail::csv_real;
  write_csv_header(os, header);
  os << kReplicationColumns << "\n";
  for (const auto &row : report.rows) {
    os << row.replication << ',' << row.arm << ',' << row.pulls << ',' << csv_real(row.mean)
       << ',' << csv_real(row.var_hat) << ',' << csv_real(row.standardized) << ','
       << (row.in_ci ? 1 : 0) << "\n";
  }
}

inline nlohmann::json header_json(const ReportHeader &header) {
  return {{"schema_version", kReportSchemaVersion},
          {"config_hash", hash_hex(header.config_hash)},
          {"root_seed", header.root_seed},
          {"tool", header.tool}};
}

/// Aggregates of one experiment; `config_entries` is echoed verbatim.
inline nlohmann::json report_summary_json(const ExperimentReport &report) {
  using io_detail::json_real;
  using io_detail::json_reals;
  nlohmann::json arms = nlohmann::json::array();
  for (std::size_t a = 0; a < report.stability_ratios.size(); ++a) {
    const auto q = summarize_ratios(report.stability_ratios[a]);
    arms.push_back({{"arm", a},
                    {"gap", json_real(report.prediction.gaps[a])},
                    {"predicted_pulls", json_real(report.prediction.predicted_pulls[a])},
                    {"ratio_q1", json_real(q.q1)},
                    {"ratio_median", json_real(q.median)},
                    {"ratio_q3", json_real(q.q3)},
                    {"ks_distance", json_real(report.ks_distance[a])},
                    {"degenerate_replications", report.degenerate_counts[a]}});
  }
  return {{"horizon", report.horizon},
          {"replications", report.replications},
          {"n_star", json_real(report.prediction.n_star)},
          {"solver_residual", json_real(report.prediction.residual)},
          {"direction", json_reals(report.direction)},
          {"direction_truth", json_real(report.direction_truth)},
          {"coverage_rate", json_real(report.coverage_rate)},
          {"coverage_std_error", json_real(report.coverage_std_error)},
          {"degenerate_intervals", report.degenerate_intervals},
          {"mean_regret", json_real(report.mean_regret)},
          {"arms", arms}};
}

inline void write_summary_json(std::ostream &os, const ReportHeader &header,
                               const std::map<std::string, std::string> &config_entries,
                               const nlohmann::json &summary) {
  nlohmann::json doc = header_json(header);
  doc["config"] = config_entries;
  doc["summary"] = summary;
  os << doc.dump(2) << "\n";
}

inline void write_stability_csv(std::ostream &os, const std::vector<StabilityPoint> &points,
                                const ReportHeader &header) {
  using io_detail::csv_real;
  write_csv_header(os, header);
  os << kStabilityColumns << "\n";
  for (const auto &p : points) {
    for (std::size_t a = 0; a < p.ratios.size(); ++a) {
      const auto &q = p.ratios[a];
      os << p.horizon << ',' << a << ',' << csv_real(p.report.prediction.n_star) << ','
         << csv_real(p.report.prediction.predicted_pulls[a]) << ',' << csv_real(q.q1) << ','
         << csv_real(q.median) << ',' << csv_real(q.q3) << ',' << csv_real(q.iqr()) << "\n";
    }
  }
}

inline void write_growing_k_csv(std::ostream &os, const std::vector<GrowingKPoint> &points,
                                const ReportHeader &header) {
  using io_detail::csv_real;
  write_csv_header(os, header);
  os << kGrowingKColumns << "\n";
  for (const auto &p : points) {
    os << p.horizon << ',' << p.arm_count << ',' << csv_real(p.report.prediction.n_star) << ','
       << csv_real(p.near_optimal_threshold) << ',' << csv_real(p.near_optimal_fraction) << ','
       << csv_real(p.max_median_deviation) << ',' << csv_real(p.report.mean_regret) << "\n";
  }
}

}  // namespace ucbstab

#endif  // UCBSTAB_REPORT_IO_HPP_
