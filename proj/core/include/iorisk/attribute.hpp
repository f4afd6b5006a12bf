#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iorisk/ingest.hpp"

namespace iorisk {

/// Usage of one job on one filesystem within one bin, summed over its nodes.
struct JobBinUsage {
  std::string job_id;
  std::string fs_id;
  Timestamp bin_start = 0;
  Counters deltas{};

  friend bool operator==(const JobBinUsage&, const JobBinUsage&) = default;
};

/// Filesystem-wide usage within one bin (either totals or the unattributed
/// remainder, depending on context).
struct FsBinUsage {
  std::string fs_id;
  Timestamp bin_start = 0;
  Counters deltas{};

  friend bool operator==(const FsBinUsage&, const FsBinUsage&) = default;
};

struct AttributionResult {
  /// Sorted by (job_id, fs_id, bin_start).
  std::vector<JobBinUsage> job_usage;
  /// Node-bin usage no job owned, sorted by (fs_id, bin_start).
  std::vector<FsBinUsage> unattributed;
};

/// Two jobs hold the same node at the same time.
class AttributionConflict : public std::runtime_error {
 public:
  AttributionConflict(std::string node, std::string first, std::string second);

  const std::string& node() const noexcept { return node_; }
  const std::string& first_job() const noexcept { return first_; }
  const std::string& second_job() const noexcept { return second_; }

 private:
  std::string node_;
  std::string first_;
  std::string second_;
};

/// Throws AttributionConflict if any node is allocated to overlapping jobs.
void check_exclusive_allocation(const std::vector<JobRecord>& jobs);

/// Assigns each node-bin delta to the job(s) holding the node during the bin.
///
/// The bin [bin_start, bin_start + bin_width) is cut into time segments in
/// chronological order: one per overlapping job interval [start_ts, end_ts)
/// and one per gap owned by nobody. The delta is apportioned over those
/// segments by length with exact-sum rounding; gap shares go to the
/// unattributed ledger of the filesystem.
AttributionResult attribute_usage(const std::vector<BinnedNodeUsage>& node_usage,
                                  const std::vector<JobRecord>& jobs,
                                  Timestamp bin_width = kDefaultBinWidth);

/// Sums node usage per (fs, bin). Sorted by (fs_id, bin_start).
std::vector<FsBinUsage> sum_by_fs_bin(const std::vector<BinnedNodeUsage>& usage);

void write_job_usage(std::ostream& out, const std::vector<JobBinUsage>& usage);
std::vector<JobBinUsage> read_job_usage(std::istream& in);

/// `fs,bin_start,<21 counters>`; used for unattributed.csv and fs totals.
void write_fs_usage(std::ostream& out, const std::vector<FsBinUsage>& usage);
std::vector<FsBinUsage> read_fs_usage(std::istream& in);

}  // namespace iorisk
