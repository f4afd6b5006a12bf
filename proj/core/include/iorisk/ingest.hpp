#pragma once

#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "iorisk/apportion.hpp"
#include "iorisk/csv.hpp"
#include "iorisk/op_kind.hpp"

namespace iorisk {

inline constexpr Timestamp kDefaultBinWidth = 360;
inline constexpr int kDefaultCoresPerNode = 24;

/// One node's cumulative counter snapshot for one filesystem.
struct CounterSample {
  Timestamp timestamp = 0;
  std::string node_id;
  std::string fs_id;
  Counters values{};

  friend bool operator==(const CounterSample&, const CounterSample&) = default;
};

/// Scheduler accounting for one job. The node set is kept sorted.
struct JobRecord {
  std::string job_id;
  std::string project;
  std::string command;
  std::vector<std::string> nodes;
  Timestamp start_ts = 0;
  Timestamp end_ts = 0;
  int cores_per_node = kDefaultCoresPerNode;

  Timestamp elapsed() const { return end_ts - start_ts; }

  friend bool operator==(const JobRecord&, const JobRecord&) = default;
};

/// Counter deltas accrued by one node on one filesystem within one bin.
struct BinnedNodeUsage {
  std::string node_id;
  std::string fs_id;
  Timestamp bin_start = 0;
  Counters deltas{};

  friend bool operator==(const BinnedNodeUsage&,
                         const BinnedNodeUsage&) = default;
};

struct BinningOptions {
  Timestamp bin_width = kDefaultBinWidth;
  /// Intervals between snapshots longer than this many bins are dropped.
  int max_gap_bins = 3;
  /// Feed values are already per-interval deltas rather than cumulative.
  bool pre_differenced = false;
};

struct FeedOptions {
  int default_cores_per_node = kDefaultCoresPerNode;
};

inline constexpr std::string_view kCounterHeader =
    "ts,node,fs,read_kb,read_ops,write_kb,write_ops,other,open,close,mknod,"
    "link,unlink,mkdir,rmdir,ren,getattr,setattr,getxattr,setxattr,statfs,"
    "sync,sdr,cdr";
inline constexpr std::string_view kJobHeader =
    "job_id,project,command,nodes,start_ts,end_ts,cores_per_node";

std::vector<CounterSample> parse_counter_feed(std::istream& in);
std::vector<JobRecord> parse_job_feed(std::istream& in,
                                      const FeedOptions& options = {});

void write_counter_feed(std::ostream& out,
                        const std::vector<CounterSample>& samples);
void write_job_feed(std::ostream& out, const std::vector<JobRecord>& jobs);

/// Converts cumulative snapshots into per-bin deltas, per (node, fs).
///
/// The delta between consecutive snapshots is spread over the bins its
/// interval [earlier, later) overlaps, in proportion to overlap seconds. A
/// decreasing value is a counter reset and the new value is the delta.
/// Output is sorted by (node, fs, bin_start) and covers every bin touched by
/// a retained interval, including bins with all-zero deltas.
std::vector<BinnedNodeUsage> deltify_and_bin(std::vector<CounterSample> samples,
                                             const BinningOptions& options = {});

/// Writes and reads the node-usage intermediate file
/// (`node,fs,bin_start,<21 counters>`).
void write_node_usage(std::ostream& out,
                      const std::vector<BinnedNodeUsage>& usage);
std::vector<BinnedNodeUsage> read_node_usage(std::istream& in);

/// Helpers shared by the `<key columns>,<21 counters>` file formats.
std::string counters_header_suffix();
void append_counters(std::string& line, const Counters& counters);
void parse_counters(const std::vector<std::string_view>& fields,
                    std::size_t first, std::size_t line_no, Counters& out);

}  // namespace iorisk
