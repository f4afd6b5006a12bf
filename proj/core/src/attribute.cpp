#include "iorisk/attribute.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>

namespace iorisk {
namespace {

struct Interval {
  Timestamp start;
  Timestamp end;
  std::size_t job;
};

struct Segment {
  Timestamp length;
  std::ptrdiff_t job;  // -1 when unowned
};

std::vector<std::string_view> split_fields(std::string_view row,
                                           std::vector<std::string>& owned,
                                           std::size_t line_no) {
  std::vector<std::string_view> fields;
  if (row.find('"') != std::string_view::npos) {
    if (!csv::split(row, owned))
      throw ParseError(line_no, "", "unterminated quoted field");
    fields.assign(owned.begin(), owned.end());
  } else {
    csv::split_plain(row, fields);
  }
  return fields;
}

template <typename Row, typename Fill>
std::vector<Row> read_keyed(std::istream& in, const std::string& header,
                            std::size_t keys, Fill fill) {
  std::string line;
  if (!std::getline(in, line) || csv::chomp(line) != header)
    throw ParseError(1, "", "schema error: expected header '" + header + "'");
  std::vector<Row> rows;
  std::vector<std::string> owned;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = csv::chomp(line);
    if (row.empty()) continue;
    auto fields = split_fields(row, owned, line_no);
    if (fields.size() != keys + kOpCount)
      throw ParseError(line_no, "", "wrong field count");
    Row r;
    fill(r, fields, line_no);
    parse_counters(fields, keys, line_no, r.deltas);
    rows.push_back(std::move(r));
  }
  return rows;
}

Timestamp parse_ts(std::string_view text, std::size_t line_no) {
  std::int64_t v = 0;
  if (!csv::parse_int(text, v))
    throw ParseError(line_no, "bin_start", "not an integer");
  return v;
}

}  // namespace

AttributionConflict::AttributionConflict(std::string node, std::string first,
                                         std::string second)
    : std::runtime_error("attribution conflict on node '" + node + "': jobs '" +
                         first + "' and '" + second + "' overlap"),
      node_(std::move(node)),
      first_(std::move(first)),
      second_(std::move(second)) {}

namespace {

std::unordered_map<std::string, std::vector<Interval>> allocation_by_node(
    const std::vector<JobRecord>& jobs) {
  std::unordered_map<std::string, std::vector<Interval>> by_node;
  for (std::size_t j = 0; j < jobs.size(); ++j)
    for (const auto& node : jobs[j].nodes)
      by_node[node].push_back({jobs[j].start_ts, jobs[j].end_ts, j});
  for (auto& [node, intervals] : by_node) {
    std::sort(intervals.begin(), intervals.end(),
              [&](const Interval& a, const Interval& b) {
                if (a.start != b.start) return a.start < b.start;
                return jobs[a.job].job_id < jobs[b.job].job_id;
              });
    for (std::size_t i = 1; i < intervals.size(); ++i)
      if (intervals[i].start < intervals[i - 1].end)
        throw AttributionConflict(node, jobs[intervals[i - 1].job].job_id,
                                  jobs[intervals[i].job].job_id);
  }
  return by_node;
}

}  // namespace

void check_exclusive_allocation(const std::vector<JobRecord>& jobs) {
  (void)allocation_by_node(jobs);
}

AttributionResult attribute_usage(const std::vector<BinnedNodeUsage>& node_usage,
                                  const std::vector<JobRecord>& jobs,
                                  Timestamp bin_width) {
  if (bin_width <= 0) throw std::invalid_argument("bin width must be positive");
  const auto by_node = allocation_by_node(jobs);

  std::map<std::tuple<std::string_view, std::string_view, Timestamp>, Counters>
      attributed;
  std::map<std::pair<std::string_view, Timestamp>, Counters> unowned;

  std::vector<Segment> segments;
  std::vector<std::int64_t> weights;
  std::vector<Counters> parts;
  static const std::vector<Interval> kNoJobs;

  for (const auto& u : node_usage) {
    const Timestamp lo = u.bin_start;
    const Timestamp hi = u.bin_start + bin_width;
    auto it = by_node.find(u.node_id);
    const auto& intervals = it == by_node.end() ? kNoJobs : it->second;

    segments.clear();
    Timestamp cursor = lo;
    auto first = std::upper_bound(
        intervals.begin(), intervals.end(), lo,
        [](Timestamp t, const Interval& iv) { return t < iv.end; });
    for (auto iv = first; iv != intervals.end() && iv->start < hi; ++iv) {
      Timestamp s = std::max(iv->start, lo);
      Timestamp e = std::min(iv->end, hi);
      if (s > cursor) segments.push_back({s - cursor, -1});
      segments.push_back({e - s, static_cast<std::ptrdiff_t>(iv->job)});
      cursor = e;
    }
    if (cursor < hi) segments.push_back({hi - cursor, -1});

    if (segments.size() == 1) {
      const Segment& only = segments.front();
      if (only.job < 0)
        unowned[{u.fs_id, u.bin_start}] += u.deltas;
      else
        attributed[{jobs[only.job].job_id, u.fs_id, u.bin_start}] += u.deltas;
      continue;
    }

    weights.clear();
    for (const auto& seg : segments) weights.push_back(seg.length);
    parts.assign(segments.size(), Counters{});
    apportion(u.deltas, weights, parts);
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (segments[i].job < 0)
        unowned[{u.fs_id, u.bin_start}] += parts[i];
      else
        attributed[{jobs[segments[i].job].job_id, u.fs_id, u.bin_start}] +=
            parts[i];
    }
  }

  AttributionResult result;
  result.job_usage.reserve(attributed.size());
  for (const auto& [key, deltas] : attributed)
    result.job_usage.push_back({std::string(std::get<0>(key)),
                                std::string(std::get<1>(key)),
                                std::get<2>(key), deltas});
  result.unattributed.reserve(unowned.size());
  for (const auto& [key, deltas] : unowned)
    result.unattributed.push_back(
        {std::string(key.first), key.second, deltas});
  return result;
}

std::vector<FsBinUsage> sum_by_fs_bin(const std::vector<BinnedNodeUsage>& usage) {
  std::map<std::pair<std::string_view, Timestamp>, Counters> totals;
  for (const auto& u : usage) totals[{u.fs_id, u.bin_start}] += u.deltas;
  std::vector<FsBinUsage> out;
  out.reserve(totals.size());
  for (const auto& [key, deltas] : totals)
    out.push_back({std::string(key.first), key.second, deltas});
  return out;
}

void write_job_usage(std::ostream& out, const std::vector<JobBinUsage>& usage) {
  out << "job_id,fs,bin_start" << counters_header_suffix() << '\n';
  std::string line;
  for (const auto& u : usage) {
    line = csv::quote(u.job_id);
    line.push_back(',');
    line.append(csv::quote(u.fs_id));
    line.push_back(',');
    line.append(std::to_string(u.bin_start));
    append_counters(line, u.deltas);
    line.push_back('\n');
    out << line;
  }
}

std::vector<JobBinUsage> read_job_usage(std::istream& in) {
  return read_keyed<JobBinUsage>(
      in, "job_id,fs,bin_start" + counters_header_suffix(), 3,
      [](JobBinUsage& r, const std::vector<std::string_view>& f,
         std::size_t line_no) {
        r.job_id = std::string(f[0]);
        r.fs_id = std::string(f[1]);
        r.bin_start = parse_ts(f[2], line_no);
      });
}

void write_fs_usage(std::ostream& out, const std::vector<FsBinUsage>& usage) {
  out << "fs,bin_start" << counters_header_suffix() << '\n';
  std::string line;
  for (const auto& u : usage) {
    line = csv::quote(u.fs_id);
    line.push_back(',');
    line.append(std::to_string(u.bin_start));
    append_counters(line, u.deltas);
    line.push_back('\n');
    out << line;
  }
}

std::vector<FsBinUsage> read_fs_usage(std::istream& in) {
  return read_keyed<FsBinUsage>(
      in, "fs,bin_start" + counters_header_suffix(), 2,
      [](FsBinUsage& r, const std::vector<std::string_view>& f,
         std::size_t line_no) {
        r.fs_id = std::string(f[0]);
        r.bin_start = parse_ts(f[1], line_no);
      });
}

}  // namespace iorisk
