#pragma once

#include <array>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "iorisk/attribute.hpp"

namespace iorisk {

inline constexpr std::string_view kFsSubject = "__fs__";

using OpValues = std::array<double, kOpCount>;

/// Mean per-bin filesystem-wide deltas over a window of bins.
struct FsBaseline {
  std::string fs_id;
  OpValues avg{};
  double md_total_avg = 0.0;
  Timestamp window_start = 0;
  Timestamp window_end = 0;  // exclusive
  std::size_t bins = 0;
};

struct RiskParams {
  double alpha = 2.0;
  double beta = 0.25;
  /// An MDS counter whose alpha-scaled mean is below this many ops per bin is
  /// scored against the beta-scaled mean of all metadata operations instead.
  double md_small_avg_threshold = 1.0;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

struct RiskPoint {
  std::string subject;  // job id, or kFsSubject for filesystem totals
  std::string fs_id;
  Timestamp bin_start = 0;
  double risk_oss = 0.0;
  double risk_mds = 0.0;
  OpValues per_op_risk{};  // clamped contributions
  bool degenerate_mds_baseline = false;
};

struct QualityPoint {
  std::string subject;
  std::string fs_id;
  Timestamp bin_start = 0;
  double read_kb_ops = 0.0;
  double write_kb_ops = 0.0;
};

struct MetricPoint {
  RiskPoint risk;
  QualityPoint quality;
};

enum class QualityAggregation { Sum, Mean };

/// Half-open range of bin starts; a missing bound means "extent of the data".
struct BaselineWindow {
  std::optional<Timestamp> start;
  std::optional<Timestamp> end;
};

/// Averages the per-bin totals of `fs_id` over the bins of `window`. Bins in
/// the window with no record count as zero activity.
FsBaseline compute_baseline(std::span<const FsBinUsage> fs_usage,
                            const std::string& fs_id, BaselineWindow window,
                            Timestamp bin_width = kDefaultBinWidth);

/// (x - alpha*avg) / (alpha*avg). Unclamped; rejects avg <= 0 or alpha <= 0.
double op_risk(double x, double avg, double alpha);

RiskPoint job_bin_risk(const JobBinUsage& usage, const FsBaseline& baseline,
                       const RiskParams& params);

/// Ops per MiB transferred: ops * 1024 / kb. Zero when the bin had no I/O in
/// that direction; the denominator is floored at 1 KiB when there were
/// operations but no bytes.
QualityPoint job_bin_quality(const JobBinUsage& usage);

double kb_ops(Count ops, Count kb);

/// Sums job risks into the filesystem point. Quality sums (or averages) only
/// jobs whose risk_oss is positive.
MetricPoint fs_bin_aggregate(std::span<const MetricPoint> job_points,
                             QualityAggregation mode = QualityAggregation::Sum);

struct MetricsOptions {
  RiskParams params;
  Timestamp bin_width = kDefaultBinWidth;
  /// Trailing baseline window length in days; unset means the whole dataset.
  std::optional<int> baseline_days;
  QualityAggregation quality_mode = QualityAggregation::Sum;
};

struct MetricsResult {
  std::map<std::string, FsBaseline> baselines;
  /// Sorted by (fs, bin_start, subject).
  std::vector<MetricPoint> job_points;
  /// One per (fs, bin) present in the filesystem totals; sorted.
  std::vector<MetricPoint> fs_points;
  std::size_t degenerate_points = 0;
};

/// Baselines from `fs_totals`, then per job-bin and per fs-bin metrics.
MetricsResult compute_metrics(const std::vector<JobBinUsage>& job_usage,
                              const std::vector<FsBinUsage>& fs_totals,
                              const MetricsOptions& options = {});

/// risk_timeseries.csv: fs rows first within each (fs, bin), then jobs.
void write_risk_timeseries(std::ostream& out, const MetricsResult& metrics);

/// One row of risk_timeseries.csv (per-op detail is not stored).
struct RiskRow {
  std::string fs_id;
  Timestamp bin_start = 0;
  std::string subject;
  double risk_oss = 0.0;
  double risk_mds = 0.0;
  double read_kb_ops = 0.0;
  double write_kb_ops = 0.0;
};
std::vector<RiskRow> read_risk_timeseries(std::istream& in);

void write_baselines(std::ostream& out,
                     const std::map<std::string, FsBaseline>& baselines);

}  // namespace iorisk
