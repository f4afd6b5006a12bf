#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "iorisk/config.hpp"

namespace iorisk {

/// Missing input files or an incompatible intermediate store.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File layout under the output directory.
struct OutputLayout {
  explicit OutputLayout(std::filesystem::path root);

  std::filesystem::path root;
  std::filesystem::path store;
  std::filesystem::path manifest;      // store/manifest.txt
  std::filesystem::path store_jobs;    // store/jobs.csv
  std::filesystem::path node_usage;    // store/node_usage.csv
  std::filesystem::path job_usage;     // store/job_usage.csv
  std::filesystem::path fs_totals;     // store/fs_totals.csv
  std::filesystem::path unattributed;  // unattributed.csv
  std::filesystem::path baseline;      // baseline.csv
  std::filesystem::path risk;          // risk_timeseries.csv
  std::filesystem::path job_summary;   // job_summary.csv
  std::filesystem::path scatter;       // scatter.csv
  std::filesystem::path slowdown;      // slowdown.csv
  std::filesystem::path breakdown;     // breakdown.csv
  std::filesystem::path timeseries;    // timeseries/
  std::filesystem::path correlation;   // correlation.csv

  std::filesystem::path heatmap_csv(std::string_view measure) const;
  std::filesystem::path heatmap_svg(std::string_view measure) const;
};

struct StageReport {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> warnings;
};

/// Parses the counter and job feeds, bins and attributes usage, and writes
/// the intermediate store plus unattributed.csv.
StageReport run_ingest(const Config& config);

/// Metrics and analytics over the store: baseline, risk time series, job
/// summary, scatter and slowdown files.
StageReport run_analyze(const Config& config);

/// Heatmaps, breakdown table, daily time series and (when a probe feed is
/// configured) the risk/probe correlation.
StageReport run_report(const Config& config);

/// ingest, analyze, report in order.
StageReport run_all(const Config& config);

}  // namespace iorisk
