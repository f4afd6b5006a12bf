#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "iorisk/analytics.hpp"

namespace iorisk {

enum class HeatmapMeasure { ReadGib, WriteGib, MeanReadOpsS, MeanWriteOpsS };

inline constexpr std::array<HeatmapMeasure, 4> kAllMeasures = {
    HeatmapMeasure::ReadGib, HeatmapMeasure::WriteGib,
    HeatmapMeasure::MeanReadOpsS, HeatmapMeasure::MeanWriteOpsS};

std::string_view measure_name(HeatmapMeasure m);
/// Throws std::invalid_argument for an unknown name.
HeatmapMeasure parse_measure(std::string_view name);
double measure_value(const JobIoSummary& s, HeatmapMeasure m);

/// Job-size row: 0 for a single node, otherwise k for nodes in (2^(k-1), 2^k].
int size_row(std::size_t nodes);
/// Measure column exponent k for v in (2^(k-1), 2^k]; nullopt for v == 0.
std::optional<int> measure_exponent(double value);

/// "1", "2", "3-4", "5-8", ... for a size row.
std::string size_bin_label(int row);
/// "0" for the zero column, otherwise "(2^(k-1),2^k]".
std::string measure_bin_label(std::optional<int> exponent);

/// Core-hour weighted histogram of job size against a per-job measure.
struct Heatmap {
  HeatmapMeasure measure = HeatmapMeasure::ReadGib;
  int rows = 0;     // size rows 0..rows-1
  int min_exp = 0;  // column 1 holds exponent min_exp
  int max_exp = -1;
  /// [row][col]; col 0 is the zero-measure column.
  std::vector<std::vector<std::int64_t>> core_seconds;

  int cols() const { return 1 + (max_exp >= min_exp ? max_exp - min_exp + 1 : 0); }
  int column_of(double value) const;
  double core_h(int row, int col) const {
    return static_cast<double>(core_seconds[row][col]) / 3600.0;
  }
  std::int64_t total_core_seconds() const;
  std::string row_label(int row) const;
  std::string col_label(int col) const;
};

Heatmap build_heatmap(const std::vector<JobIoSummary>& summaries,
                      HeatmapMeasure measure);

/// `measure,size_bin,measure_bin,core_h`, one row per cell.
void write_heatmap(std::ostream& out, const Heatmap& heatmap);

inline constexpr std::array<double, 4> kBreakdownEdgesGib = {4, 32, 256, 2048};
inline constexpr std::array<std::string_view, 5> kBreakdownLabels = {
    "(0,4)", "[4,32)", "[32,256)", "[256,2048)", "[2048,)"};

/// Index of the breakdown bin for a per-job data volume; zero joins (0,4).
std::size_t breakdown_bin(double gib);

struct BreakdownTable {
  std::array<std::int64_t, 5> read_core_seconds{};
  std::array<std::int64_t, 5> write_core_seconds{};
  std::array<double, 5> read_pct{};
  std::array<double, 5> write_pct{};
};

BreakdownTable build_breakdown(const std::vector<JobIoSummary>& summaries);
void write_breakdown(std::ostream& out, const BreakdownTable& table);

/// One day of a filesystem's risk, with the top contributors broken out.
struct DailySeries {
  std::string fs_id;
  Timestamp day_start = 0;
  std::vector<Timestamp> bins;
  std::vector<std::string> top_jobs;   // ranked by time-integrated risk
  std::vector<double> total_oss, total_mds;
  std::vector<std::vector<double>> job_oss, job_mds;  // [job][bin]
  std::vector<double> other_oss, other_mds;
};

struct TimeseriesOptions {
  std::size_t top_k = 5;
  Timestamp bin_width = 360;
  /// Seconds added to UTC midnight to form the day boundary.
  Timestamp day_offset = 0;
  bool svg = false;
};

/// Splits the rows of `fs_id` into days and ranks jobs per day by
/// sum over bins of (risk_oss + risk_mds). Days between the first and last
/// bin of the filesystem that contain no rows come back with no bins.
std::vector<DailySeries> build_daily_series(const std::vector<RiskRow>& rows,
                                            const std::string& fs_id,
                                            const TimeseriesOptions& options);

void write_daily_series(std::ostream& out, const DailySeries& series);

/// "YYYY-MM-DD" of the day that starts at `day_start - offset`.
std::string day_label(Timestamp day_start, Timestamp offset = 0);

/// Writes `<dir>/<fs>_<date>.csv` (and `.svg`) for every fs and day.
/// Returns the paths written, in order.
std::vector<std::filesystem::path> emit_timeseries(
    const std::vector<RiskRow>& rows, const std::filesystem::path& dir,
    const TimeseriesOptions& options);

struct SeriesSample {
  Timestamp ts = 0;
  double value = 0.0;
};
using TimeSeries = std::vector<SeriesSample>;

/// Per-bin mean of the samples falling in each bin; output is keyed by bin
/// start, sorted, and only holds bins that had samples.
TimeSeries resample_mean(const TimeSeries& series, Timestamp bin_width);

struct Correlation {
  std::optional<double> pearson;  // nullopt when either side has zero variance
  std::size_t overlap = 0;
};

/// Pearson correlation of a[t] against b[t + lag * bin_width] over the bins
/// both series share. Both inputs must already be on the bin grid. Throws
/// std::invalid_argument with fewer than three shared bins.
Correlation correlate_series(const TimeSeries& a, const TimeSeries& b, int lag,
                             Timestamp bin_width);

/// Probe latency feed: `ts,fs,latency_ms`.
struct ProbeSample {
  Timestamp ts = 0;
  std::string fs_id;
  double latency_ms = 0.0;
};
inline constexpr std::string_view kProbeHeader = "ts,fs,latency_ms";
std::vector<ProbeSample> parse_probe_feed(std::istream& in);
void write_probe_feed(std::ostream& out, const std::vector<ProbeSample>& samples);

/// Filesystem total risk (risk_oss + risk_mds) per bin from `__fs__` rows.
TimeSeries fs_risk_series(const std::vector<RiskRow>& rows, const std::string& fs_id);

}  // namespace iorisk
