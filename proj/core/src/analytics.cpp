#include "iorisk/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace iorisk {

std::vector<ApplicationGroup> group_applications(const std::vector<JobRecord>& jobs) {
  std::map<std::string, ApplicationGroup> by_command;
  for (const auto& job : jobs) {
    auto& g = by_command[job.command];
    g.command = job.command;
    g.run_ids.push_back(job.job_id);
    g.runtimes.push_back(job.elapsed());
  }
  std::vector<ApplicationGroup> groups;
  groups.reserve(by_command.size());
  for (auto& [command, g] : by_command) {
    long double sum = 0;
    for (Timestamp t : g.runtimes) sum += static_cast<long double>(t);
    g.mean_runtime = static_cast<double>(sum / g.runtimes.size());
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<SlowdownFinding> detect_slowdown(
    const std::vector<ApplicationGroup>& groups, double factor,
    std::size_t min_group) {
  if (!(factor > 1.0)) throw std::invalid_argument("slowdown factor must exceed 1");
  if (min_group < 2) throw std::invalid_argument("min_group must be at least 2");
  std::vector<SlowdownFinding> findings;
  for (const auto& g : groups) {
    if (g.run_ids.size() < min_group || !(g.mean_runtime > 0.0)) continue;
    for (std::size_t i = 0; i < g.run_ids.size(); ++i) {
      const double ratio = static_cast<double>(g.runtimes[i]) / g.mean_runtime;
      if (ratio >= factor)
        findings.push_back({g.run_ids[i], g.command, g.runtimes[i],
                            g.mean_runtime, ratio});
    }
  }
  return findings;
}

std::size_t bins_spanned(const JobRecord& job, Timestamp bin_width) {
  const Timestamp first = bin_floor(job.start_ts, bin_width);
  const Timestamp last = bin_floor(job.end_ts - 1, bin_width);
  return static_cast<std::size_t>((last - first) / bin_width + 1);
}

namespace {

bool has_data_io(const Counters& c) {
  return c[index(OpKind::ReadKb)] > 0 || c[index(OpKind::ReadOps)] > 0 ||
         c[index(OpKind::WriteKb)] > 0 || c[index(OpKind::WriteOps)] > 0;
}

struct ScatterAccum {
  double risk_oss = 0.0;
  double risk_mds = 0.0;
  double quality = 0.0;
  std::size_t quality_bins = 0;
};

}  // namespace

std::vector<ScatterPoint> build_scatter(const std::vector<JobRecord>& jobs,
                                        const std::vector<RiskRow>& rows,
                                        const std::vector<JobBinUsage>& job_usage,
                                        Timestamp bin_width,
                                        double min_total_risk) {
  std::set<std::tuple<std::string_view, std::string_view, Timestamp>> io_bins;
  for (const auto& u : job_usage)
    if (has_data_io(u.deltas)) io_bins.insert({u.job_id, u.fs_id, u.bin_start});

  std::unordered_map<std::string_view, ScatterAccum> acc;
  for (const auto& r : rows) {
    if (r.subject == kFsSubject) continue;
    auto& a = acc[r.subject];
    a.risk_oss += r.risk_oss;
    a.risk_mds += r.risk_mds;
    if (io_bins.count({r.subject, r.fs_id, r.bin_start})) {
      a.quality += r.read_kb_ops + r.write_kb_ops;
      ++a.quality_bins;
    }
  }

  std::vector<ScatterPoint> points;
  for (const auto& job : jobs) {
    ScatterPoint p;
    p.job_id = job.job_id;
    p.command = job.command;
    auto it = acc.find(job.job_id);
    if (it != acc.end()) {
      const double n = static_cast<double>(bins_spanned(job, bin_width));
      p.avg_risk_oss = it->second.risk_oss / n;
      p.avg_risk_mds = it->second.risk_mds / n;
      if (it->second.quality_bins > 0)
        p.avg_quality =
            it->second.quality / static_cast<double>(it->second.quality_bins);
    }
    if (p.avg_risk_oss + p.avg_risk_mds >= min_total_risk)
      points.push_back(std::move(p));
  }
  return points;
}

std::vector<ScatterPoint> build_scatter(const std::vector<JobRecord>& jobs,
                                        const std::vector<MetricPoint>& job_points,
                                        const std::vector<JobBinUsage>& job_usage,
                                        Timestamp bin_width,
                                        double min_total_risk) {
  std::vector<RiskRow> rows;
  rows.reserve(job_points.size());
  for (const auto& p : job_points)
    rows.push_back({p.risk.fs_id, p.risk.bin_start, p.risk.subject,
                    p.risk.risk_oss, p.risk.risk_mds, p.quality.read_kb_ops,
                    p.quality.write_kb_ops});
  return build_scatter(jobs, rows, job_usage, bin_width, min_total_risk);
}

std::vector<JobIoSummary> summarize_jobs(const std::vector<JobRecord>& jobs,
                                         const std::vector<JobBinUsage>& usage) {
  std::unordered_map<std::string_view, Counters> totals;
  for (const auto& u : usage) totals[u.job_id] += u.deltas;

  constexpr double kKibPerGib = 1024.0 * 1024.0;
  std::vector<JobIoSummary> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) {
    if (job.elapsed() <= 0)
      throw std::invalid_argument("job '" + job.job_id + "' has no elapsed time");
    JobIoSummary s;
    s.job_id = job.job_id;
    s.project = job.project;
    s.command = job.command;
    s.nodes_count = job.nodes.size();
    s.core_seconds = static_cast<std::int64_t>(s.nodes_count) *
                     job.cores_per_node * job.elapsed();
    s.core_h = static_cast<double>(s.core_seconds) / 3600.0;
    if (auto it = totals.find(job.job_id); it != totals.end()) s.totals = it->second;
    s.read_kb_total = s.totals[index(OpKind::ReadKb)];
    s.write_kb_total = s.totals[index(OpKind::WriteKb)];
    s.read_ops_total = s.totals[index(OpKind::ReadOps)];
    s.write_ops_total = s.totals[index(OpKind::WriteOps)];
    s.read_gib = static_cast<double>(s.read_kb_total) / kKibPerGib;
    s.write_gib = static_cast<double>(s.write_kb_total) / kKibPerGib;
    const double secs = static_cast<double>(job.elapsed());
    s.mean_read_ops_s = static_cast<double>(s.read_ops_total) / secs;
    s.mean_write_ops_s = static_cast<double>(s.write_ops_total) / secs;
    out.push_back(std::move(s));
  }
  return out;
}

void write_job_summary(std::ostream& out, const std::vector<JobIoSummary>& rows) {
  out << "job_id,project,command,nodes,core_h,read_gib,write_gib,read_ops,"
         "write_ops,mean_read_ops_s,mean_write_ops_s\n";
  for (const auto& s : rows) {
    out << csv::quote(s.job_id) << ',' << csv::quote(s.project) << ','
        << csv::quote(s.command) << ',' << s.nodes_count << ','
        << csv::format_double(s.core_h) << ',' << csv::format_double(s.read_gib)
        << ',' << csv::format_double(s.write_gib) << ',' << s.read_ops_total
        << ',' << s.write_ops_total << ',' << csv::format_double(s.mean_read_ops_s)
        << ',' << csv::format_double(s.mean_write_ops_s) << '\n';
  }
}

std::vector<JobIoSummary> read_job_summary(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      csv::chomp(line) !=
          "job_id,project,command,nodes,core_h,read_gib,write_gib,read_ops,"
          "write_ops,mean_read_ops_s,mean_write_ops_s")
    throw ParseError(1, "", "schema error: not a job summary");
  std::vector<JobIoSummary> rows;
  std::vector<std::string> f;
  std::size_t line_no = 1;
  auto num = [&](const std::string& text, const char* field) {
    double v = 0;
    if (!csv::parse_double(text, v)) throw ParseError(line_no, field, "not a number");
    return v;
  };
  auto integer = [&](const std::string& text, const char* field) {
    std::int64_t v = 0;
    if (!csv::parse_int(text, v) || v < 0)
      throw ParseError(line_no, field, "not a non-negative integer");
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = csv::chomp(line);
    if (row.empty()) continue;
    if (!csv::split(row, f) || f.size() != 11)
      throw ParseError(line_no, "", "wrong field count");
    JobIoSummary s;
    s.job_id = f[0];
    s.project = f[1];
    s.command = f[2];
    s.nodes_count = static_cast<std::size_t>(integer(f[3], "nodes"));
    s.core_h = num(f[4], "core_h");
    s.core_seconds = std::llround(s.core_h * 3600.0);
    s.read_gib = num(f[5], "read_gib");
    s.write_gib = num(f[6], "write_gib");
    s.read_kb_total = std::llround(s.read_gib * 1024.0 * 1024.0);
    s.write_kb_total = std::llround(s.write_gib * 1024.0 * 1024.0);
    s.read_ops_total = integer(f[7], "read_ops");
    s.write_ops_total = integer(f[8], "write_ops");
    s.mean_read_ops_s = num(f[9], "mean_read_ops_s");
    s.mean_write_ops_s = num(f[10], "mean_write_ops_s");
    s.totals[index(OpKind::ReadKb)] = s.read_kb_total;
    s.totals[index(OpKind::WriteKb)] = s.write_kb_total;
    s.totals[index(OpKind::ReadOps)] = s.read_ops_total;
    s.totals[index(OpKind::WriteOps)] = s.write_ops_total;
    rows.push_back(std::move(s));
  }
  return rows;
}

void write_scatter(std::ostream& out, const std::vector<ScatterPoint>& rows) {
  out << "job_id,command,avg_risk_oss,avg_risk_mds,avg_quality\n";
  for (const auto& p : rows)
    out << csv::quote(p.job_id) << ',' << csv::quote(p.command) << ','
        << csv::format_double(p.avg_risk_oss) << ','
        << csv::format_double(p.avg_risk_mds) << ','
        << csv::format_double(p.avg_quality) << '\n';
}

void write_slowdown(std::ostream& out, const std::vector<SlowdownFinding>& rows) {
  out << "job_id,command,runtime_s,group_mean_s,ratio\n";
  for (const auto& f : rows)
    out << csv::quote(f.job_id) << ',' << csv::quote(f.command) << ','
        << f.runtime << ',' << csv::format_double(f.group_mean) << ','
        << csv::format_double(f.ratio) << '\n';
}

}  // namespace iorisk
