#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "iorisk/metrics.hpp"

namespace iorisk {

/// Runs sharing a byte-identical launch command.
struct ApplicationGroup {
  std::string command;
  std::vector<std::string> run_ids;  // input order
  std::vector<Timestamp> runtimes;   // parallel to run_ids
  double mean_runtime = 0.0;
};

struct SlowdownFinding {
  std::string job_id;
  std::string command;
  Timestamp runtime = 0;
  double group_mean = 0.0;
  double ratio = 0.0;
};

struct ScatterPoint {
  std::string job_id;
  std::string command;
  double avg_risk_oss = 0.0;
  double avg_risk_mds = 0.0;
  double avg_quality = 0.0;
};

/// Per-job aggregates exported to the service accounting feed.
struct JobIoSummary {
  std::string job_id;
  std::string project;
  std::string command;
  std::size_t nodes_count = 0;
  /// nodes * cores_per_node * elapsed seconds; exact integer.
  std::int64_t core_seconds = 0;
  double core_h = 0.0;
  double read_gib = 0.0;
  double write_gib = 0.0;
  Count read_kb_total = 0;
  Count write_kb_total = 0;
  Count read_ops_total = 0;
  Count write_ops_total = 0;
  double mean_read_ops_s = 0.0;
  double mean_write_ops_s = 0.0;
  /// Every counter summed over the job's bins and filesystems.
  Counters totals{};
};

inline constexpr double kDefaultSlowdownFactor = 1.5;
inline constexpr std::size_t kDefaultMinGroup = 3;
inline constexpr double kDefaultScatterMinRisk = 25.0;

/// Groups are ordered by command.
std::vector<ApplicationGroup> group_applications(const std::vector<JobRecord>& jobs);

/// Runs at or above `factor` times their group's mean runtime (the mean
/// includes the run itself). Groups smaller than `min_group` are skipped.
std::vector<SlowdownFinding> detect_slowdown(
    const std::vector<ApplicationGroup>& groups,
    double factor = kDefaultSlowdownFactor,
    std::size_t min_group = kDefaultMinGroup);

/// Number of bins of width `bin_width` that [start_ts, end_ts) overlaps.
std::size_t bins_spanned(const JobRecord& job, Timestamp bin_width);

/// Per-run averages of risk (summed over filesystems per bin, divided by the
/// bins the run spans) and of read+write quality over job-bins that saw I/O.
/// Runs whose average total risk is below `min_total_risk` are dropped.
std::vector<ScatterPoint> build_scatter(const std::vector<JobRecord>& jobs,
                                        const std::vector<MetricPoint>& job_points,
                                        const std::vector<JobBinUsage>& job_usage,
                                        Timestamp bin_width = kDefaultBinWidth,
                                        double min_total_risk = kDefaultScatterMinRisk);

/// Same as above, driven by rows read back from risk_timeseries.csv.
std::vector<ScatterPoint> build_scatter(const std::vector<JobRecord>& jobs,
                                        const std::vector<RiskRow>& rows,
                                        const std::vector<JobBinUsage>& job_usage,
                                        Timestamp bin_width = kDefaultBinWidth,
                                        double min_total_risk = kDefaultScatterMinRisk);

std::vector<JobIoSummary> summarize_jobs(const std::vector<JobRecord>& jobs,
                                         const std::vector<JobBinUsage>& usage);

void write_job_summary(std::ostream& out, const std::vector<JobIoSummary>& rows);
std::vector<JobIoSummary> read_job_summary(std::istream& in);
void write_scatter(std::ostream& out, const std::vector<ScatterPoint>& rows);
void write_slowdown(std::ostream& out, const std::vector<SlowdownFinding>& rows);

}  // namespace iorisk
