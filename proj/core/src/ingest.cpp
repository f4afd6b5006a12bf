#include "iorisk/ingest.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace iorisk {
namespace {

constexpr std::size_t kCounterColumns = 3 + kOpCount;

std::vector<std::string_view> header_fields(std::string_view header) {
  std::vector<std::string_view> fields;
  csv::split_plain(header, fields);
  return fields;
}

void check_header(std::string_view got, std::string_view want) {
  got = csv::chomp(got);
  if (got == want) return;
  auto have = header_fields(got);
  auto need = header_fields(want);
  if (have.size() != need.size())
    throw ParseError(1, "",
                     "schema error: expected " + std::to_string(need.size()) +
                         " columns, found " + std::to_string(have.size()));
  for (std::size_t i = 0; i < need.size(); ++i)
    if (have[i] != need[i])
      throw ParseError(1, std::string(have[i]),
                       "schema error: expected column '" +
                           std::string(need[i]) + "'");
  throw ParseError(1, "", "schema error: header mismatch");
}

std::int64_t require_int(std::string_view text, std::size_t line,
                         std::string_view field) {
  std::int64_t v = 0;
  if (!csv::parse_int(text, v))
    throw ParseError(line, std::string(field),
                     "not an integer: '" + std::string(text) + "'");
  return v;
}

}  // namespace

std::string counters_header_suffix() {
  std::string out;
  for (OpKind op : kAllOps) {
    out.push_back(',');
    out.append(op_name(op));
  }
  return out;
}

void append_counters(std::string& line, const Counters& counters) {
  for (Count v : counters) {
    line.push_back(',');
    line.append(std::to_string(v));
  }
}

void parse_counters(const std::vector<std::string_view>& fields,
                    std::size_t first, std::size_t line_no, Counters& out) {
  for (std::size_t i = 0; i < kOpCount; ++i) {
    std::string_view name = op_name(static_cast<OpKind>(i));
    Count v = require_int(fields[first + i], line_no, name);
    if (v < 0)
      throw ParseError(line_no, std::string(name),
                       "negative counter value " + std::to_string(v));
    out[i] = v;
  }
}

std::vector<CounterSample> parse_counter_feed(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "", "schema error: empty feed");
  check_header(line, kCounterHeader);

  std::vector<CounterSample> samples;
  std::vector<std::string_view> fields;
  std::vector<std::string> owned;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = csv::chomp(line);
    if (row.empty()) continue;
    if (row.find('"') != std::string_view::npos) {
      if (!csv::split(row, owned))
        throw ParseError(line_no, "", "unterminated quoted field");
      fields.assign(owned.begin(), owned.end());
    } else {
      csv::split_plain(row, fields);
    }
    if (fields.size() != kCounterColumns)
      throw ParseError(line_no, "",
                       "expected " + std::to_string(kCounterColumns) +
                           " fields, found " + std::to_string(fields.size()));
    CounterSample s;
    s.timestamp = require_int(fields[0], line_no, "ts");
    if (s.timestamp <= 0)
      throw ParseError(line_no, "ts", "timestamp must be positive");
    if (fields[1].empty()) throw ParseError(line_no, "node", "empty node id");
    if (fields[2].empty()) throw ParseError(line_no, "fs", "empty fs id");
    s.node_id = std::string(fields[1]);
    s.fs_id = std::string(fields[2]);
    parse_counters(fields, 3, line_no, s.values);
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<JobRecord> parse_job_feed(std::istream& in,
                                      const FeedOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "", "schema error: empty feed");
  check_header(line, kJobHeader);

  std::vector<JobRecord> jobs;
  std::vector<std::string> fields;
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = csv::chomp(line);
    if (row.empty()) continue;
    if (!csv::split(row, fields))
      throw ParseError(line_no, "command", "unterminated quoted field");
    if (fields.size() != 7)
      throw ParseError(line_no, "",
                       "expected 7 fields, found " + std::to_string(fields.size()));
    JobRecord job;
    job.job_id = fields[0];
    if (job.job_id.empty()) throw ParseError(line_no, "job_id", "empty job id");
    if (!seen.insert(job.job_id).second)
      throw ParseError(line_no, "job_id", "duplicate job id '" + job.job_id + "'");
    job.project = fields[1];
    job.command = fields[2];

    std::string_view nodes = fields[3];
    while (!nodes.empty()) {
      std::size_t semi = nodes.find(';');
      std::string_view node = nodes.substr(0, semi);
      if (!node.empty()) job.nodes.emplace_back(node);
      if (semi == std::string_view::npos) break;
      nodes.remove_prefix(semi + 1);
    }
    if (job.nodes.empty()) throw ParseError(line_no, "nodes", "empty node list");
    std::sort(job.nodes.begin(), job.nodes.end());
    job.nodes.erase(std::unique(job.nodes.begin(), job.nodes.end()),
                    job.nodes.end());

    job.start_ts = require_int(fields[4], line_no, "start_ts");
    job.end_ts = require_int(fields[5], line_no, "end_ts");
    if (job.end_ts <= job.start_ts)
      throw ParseError(line_no, "end_ts", "end_ts must be after start_ts");
    if (fields[6].empty()) {
      job.cores_per_node = options.default_cores_per_node;
    } else {
      std::int64_t cores = require_int(fields[6], line_no, "cores_per_node");
      if (cores <= 0)
        throw ParseError(line_no, "cores_per_node", "must be positive");
      job.cores_per_node = static_cast<int>(cores);
    }
    jobs.push_back(std::move(job));
  }
  return jobs;
}

void write_counter_feed(std::ostream& out,
                        const std::vector<CounterSample>& samples) {
  out << kCounterHeader << '\n';
  std::string line;
  for (const auto& s : samples) {
    line = std::to_string(s.timestamp);
    line.push_back(',');
    line.append(csv::quote(s.node_id));
    line.push_back(',');
    line.append(csv::quote(s.fs_id));
    append_counters(line, s.values);
    line.push_back('\n');
    out << line;
  }
}

void write_job_feed(std::ostream& out, const std::vector<JobRecord>& jobs) {
  out << kJobHeader << '\n';
  for (const auto& j : jobs) {
    std::string nodes;
    for (const auto& n : j.nodes) {
      if (!nodes.empty()) nodes.push_back(';');
      nodes.append(n);
    }
    out << csv::quote(j.job_id) << ',' << csv::quote(j.project) << ','
        << csv::quote(j.command) << ',' << csv::quote(nodes) << ','
        << j.start_ts << ',' << j.end_ts << ',' << j.cores_per_node << '\n';
  }
}

std::vector<BinnedNodeUsage> deltify_and_bin(std::vector<CounterSample> samples,
                                             const BinningOptions& options) {
  if (options.bin_width <= 0)
    throw std::invalid_argument("bin width must be positive");
  const Timestamp width = options.bin_width;
  const Timestamp max_gap =
      static_cast<Timestamp>(std::max(options.max_gap_bins, 0)) * width;

  std::stable_sort(samples.begin(), samples.end(),
                   [](const CounterSample& a, const CounterSample& b) {
                     if (a.node_id != b.node_id) return a.node_id < b.node_id;
                     if (a.fs_id != b.fs_id) return a.fs_id < b.fs_id;
                     return a.timestamp < b.timestamp;
                   });

  std::vector<BinnedNodeUsage> out;
  std::map<Timestamp, Counters> bins;
  std::vector<std::int64_t> weights;
  std::vector<Counters> parts;

  auto spread = [&](Timestamp from, Timestamp to, const Counters& delta) {
    if (to <= from) {
      bins[bin_floor(to, width)] += delta;
      return;
    }
    const Timestamp first = bin_floor(from, width);
    const Timestamp last = bin_floor(to - 1, width);
    if (first == last) {
      bins[first] += delta;
      return;
    }
    weights.clear();
    for (Timestamp b = first; b <= last; b += width)
      weights.push_back(std::min(to, b + width) - std::max(from, b));
    parts.assign(weights.size(), Counters{});
    apportion(delta, weights, parts);
    std::size_t i = 0;
    for (Timestamp b = first; b <= last; b += width) bins[b] += parts[i++];
  };

  auto flush = [&](const CounterSample& key) {
    for (auto& [start, deltas] : bins)
      out.push_back({key.node_id, key.fs_id, start, deltas});
    bins.clear();
  };

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const CounterSample& cur = samples[i];
    const bool continues = i > 0 && samples[i - 1].node_id == cur.node_id &&
                           samples[i - 1].fs_id == cur.fs_id;
    if (i > 0 && !continues) flush(samples[i - 1]);

    if (options.pre_differenced) {
      Timestamp from = cur.timestamp - width;
      if (continues) {
        Timestamp prev = samples[i - 1].timestamp;
        if (cur.timestamp - prev <= max_gap) from = prev;
      }
      spread(from, cur.timestamp, cur.values);
      continue;
    }
    if (!continues) continue;

    const CounterSample& prev = samples[i - 1];
    const Timestamp dt = cur.timestamp - prev.timestamp;
    if (dt > max_gap) continue;
    Counters delta{};
    for (std::size_t op = 0; op < kOpCount; ++op)
      delta[op] = cur.values[op] >= prev.values[op]
                      ? cur.values[op] - prev.values[op]
                      : cur.values[op];
    spread(prev.timestamp, cur.timestamp, delta);
  }
  if (!samples.empty()) flush(samples.back());
  return out;
}

void write_node_usage(std::ostream& out,
                      const std::vector<BinnedNodeUsage>& usage) {
  out << "node,fs,bin_start" << counters_header_suffix() << '\n';
  std::string line;
  for (const auto& u : usage) {
    line = csv::quote(u.node_id);
    line.push_back(',');
    line.append(csv::quote(u.fs_id));
    line.push_back(',');
    line.append(std::to_string(u.bin_start));
    append_counters(line, u.deltas);
    line.push_back('\n');
    out << line;
  }
}

std::vector<BinnedNodeUsage> read_node_usage(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "", "schema error: empty file");
  check_header(line, "node,fs,bin_start" + counters_header_suffix());
  std::vector<BinnedNodeUsage> usage;
  std::vector<std::string_view> fields;
  std::vector<std::string> owned;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = csv::chomp(line);
    if (row.empty()) continue;
    if (row.find('"') != std::string_view::npos) {
      if (!csv::split(row, owned))
        throw ParseError(line_no, "", "unterminated quoted field");
      fields.assign(owned.begin(), owned.end());
    } else {
      csv::split_plain(row, fields);
    }
    if (fields.size() != 3 + kOpCount)
      throw ParseError(line_no, "", "wrong field count");
    BinnedNodeUsage u;
    u.node_id = std::string(fields[0]);
    u.fs_id = std::string(fields[1]);
    u.bin_start = require_int(fields[2], line_no, "bin_start");
    parse_counters(fields, 3, line_no, u.deltas);
    usage.push_back(std::move(u));
  }
  return usage;
}

}  // namespace iorisk
