#include "iorisk/metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace iorisk {

void RiskParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(md_small_avg_threshold >= 0.0))
    throw std::invalid_argument("md threshold must be non-negative");
}

FsBaseline compute_baseline(std::span<const FsBinUsage> fs_usage,
                            const std::string& fs_id, BaselineWindow window,
                            Timestamp bin_width) {
  if (bin_width <= 0) throw std::invalid_argument("bin width must be positive");

  Timestamp data_lo = std::numeric_limits<Timestamp>::max();
  Timestamp data_hi = std::numeric_limits<Timestamp>::min();
  for (const auto& u : fs_usage) {
    if (u.fs_id != fs_id) continue;
    data_lo = std::min(data_lo, u.bin_start);
    data_hi = std::max(data_hi, u.bin_start + bin_width);
  }
  const bool have_data = data_lo < data_hi;
  if (!window.start && !have_data)
    throw std::invalid_argument("baseline: no data for filesystem '" + fs_id + "'");
  if (!window.end && !have_data)
    throw std::invalid_argument("baseline: no data for filesystem '" + fs_id + "'");

  FsBaseline b;
  b.fs_id = fs_id;
  // Snap to the bin grid: first bin starting at or after start, up to end.
  const Timestamp lo = window.start.value_or(data_lo);
  const Timestamp hi = window.end.value_or(data_hi);
  b.window_start = -floor_div(-lo, bin_width) * bin_width;
  b.window_end = hi;
  if (b.window_end <= b.window_start)
    throw std::invalid_argument("baseline: empty window for '" + fs_id + "'");
  b.bins = static_cast<std::size_t>(
      (b.window_end - b.window_start + bin_width - 1) / bin_width);

  std::array<Count, kOpCount> sums{};
  Count md_sum = 0;
  for (const auto& u : fs_usage) {
    if (u.fs_id != fs_id || u.bin_start < b.window_start ||
        u.bin_start >= b.window_end)
      continue;
    for (std::size_t i = 0; i < kOpCount; ++i) sums[i] += u.deltas[i];
    md_sum += mds_total(u.deltas);
  }
  const double n = static_cast<double>(b.bins);
  for (std::size_t i = 0; i < kOpCount; ++i)
    b.avg[i] = static_cast<double>(sums[i]) / n;
  b.md_total_avg = static_cast<double>(md_sum) / n;
  return b;
}

double op_risk(double x, double avg, double alpha) {
  if (!(avg > 0.0)) throw std::invalid_argument("op_risk: average must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("op_risk: scale must be positive");
  const double scaled = alpha * avg;
  return (x - scaled) / scaled;
}

RiskPoint job_bin_risk(const JobBinUsage& usage, const FsBaseline& baseline,
                       const RiskParams& params) {
  if (usage.fs_id != baseline.fs_id)
    throw std::invalid_argument("job_bin_risk: baseline is for '" +
                                baseline.fs_id + "', usage is on '" +
                                usage.fs_id + "'");
  RiskPoint p;
  p.subject = usage.job_id;
  p.fs_id = usage.fs_id;
  p.bin_start = usage.bin_start;

  for (std::size_t i = 0; i < kOssOpCount; ++i) {
    const double avg = baseline.avg[i];
    double r = 0.0;
    if (avg > 0.0)
      r = std::max(0.0, op_risk(static_cast<double>(usage.deltas[i]), avg,
                                params.alpha));
    p.per_op_risk[i] = r;
    p.risk_oss += r;
  }

  const bool degenerate =
      !(baseline.md_total_avg > 0.0) && mds_total(usage.deltas) > 0;
  p.degenerate_mds_baseline = degenerate;
  const double floor_denominator =
      params.md_small_avg_threshold > 0.0 ? params.md_small_avg_threshold : 1.0;

  for (std::size_t i = kOssOpCount; i < kOpCount; ++i) {
    const double x = static_cast<double>(usage.deltas[i]);
    double r = 0.0;
    if (params.alpha * baseline.avg[i] >= params.md_small_avg_threshold &&
        baseline.avg[i] > 0.0) {
      r = op_risk(x, baseline.avg[i], params.alpha);
    } else if (baseline.md_total_avg > 0.0) {
      r = op_risk(x, baseline.md_total_avg, params.beta);
    } else if (x > 0.0) {
      r = op_risk(x, floor_denominator, 1.0);
    }
    r = std::max(0.0, r);
    p.per_op_risk[i] = r;
    p.risk_mds += r;
  }
  return p;
}

double kb_ops(Count ops, Count kb) {
  if (kb > 0) return static_cast<double>(ops) * 1024.0 / static_cast<double>(kb);
  if (ops == 0) return 0.0;
  return static_cast<double>(ops) * 1024.0;
}

QualityPoint job_bin_quality(const JobBinUsage& usage) {
  QualityPoint q;
  q.subject = usage.job_id;
  q.fs_id = usage.fs_id;
  q.bin_start = usage.bin_start;
  q.read_kb_ops = kb_ops(usage.deltas[index(OpKind::ReadOps)],
                         usage.deltas[index(OpKind::ReadKb)]);
  q.write_kb_ops = kb_ops(usage.deltas[index(OpKind::WriteOps)],
                          usage.deltas[index(OpKind::WriteKb)]);
  return q;
}

MetricPoint fs_bin_aggregate(std::span<const MetricPoint> job_points,
                             QualityAggregation mode) {
  MetricPoint fs;
  if (job_points.empty()) return fs;
  const auto& head = job_points.front();
  fs.risk.subject = std::string(kFsSubject);
  fs.risk.fs_id = head.risk.fs_id;
  fs.risk.bin_start = head.risk.bin_start;
  fs.quality.subject = fs.risk.subject;
  fs.quality.fs_id = fs.risk.fs_id;
  fs.quality.bin_start = fs.risk.bin_start;

  std::size_t counted = 0;
  for (const auto& jp : job_points) {
    if (jp.risk.fs_id != fs.risk.fs_id || jp.risk.bin_start != fs.risk.bin_start)
      throw std::invalid_argument("fs_bin_aggregate: points span several fs-bins");
    fs.risk.risk_oss += jp.risk.risk_oss;
    fs.risk.risk_mds += jp.risk.risk_mds;
    for (std::size_t i = 0; i < kOpCount; ++i)
      fs.risk.per_op_risk[i] += jp.risk.per_op_risk[i];
    fs.risk.degenerate_mds_baseline |= jp.risk.degenerate_mds_baseline;
    if (jp.risk.risk_oss > 0.0) {
      fs.quality.read_kb_ops += jp.quality.read_kb_ops;
      fs.quality.write_kb_ops += jp.quality.write_kb_ops;
      ++counted;
    }
  }
  if (mode == QualityAggregation::Mean && counted > 0) {
    fs.quality.read_kb_ops /= static_cast<double>(counted);
    fs.quality.write_kb_ops /= static_cast<double>(counted);
  }
  return fs;
}

MetricsResult compute_metrics(const std::vector<JobBinUsage>& job_usage,
                              const std::vector<FsBinUsage>& fs_totals,
                              const MetricsOptions& options) {
  options.params.validate();
  if (options.baseline_days && *options.baseline_days <= 0)
    throw std::invalid_argument("baseline days must be positive");
  const Timestamp width = options.bin_width;

  MetricsResult result;
  std::map<std::string, std::pair<Timestamp, Timestamp>> extent;
  for (const auto& u : fs_totals) {
    auto [it, fresh] = extent.try_emplace(u.fs_id, u.bin_start, u.bin_start + width);
    if (!fresh) {
      it->second.first = std::min(it->second.first, u.bin_start);
      it->second.second = std::max(it->second.second, u.bin_start + width);
    }
  }
  for (const auto& [fs, range] : extent) {
    BaselineWindow window{range.first, range.second};
    if (options.baseline_days)
      window.start = std::max(
          range.first, range.second - Timestamp{*options.baseline_days} * 86400);
    result.baselines.emplace(fs, compute_baseline(fs_totals, fs, window, width));
  }

  result.job_points.reserve(job_usage.size());
  for (const auto& u : job_usage) {
    auto it = result.baselines.find(u.fs_id);
    if (it == result.baselines.end())
      throw std::invalid_argument("no filesystem totals for '" + u.fs_id + "'");
    MetricPoint mp{job_bin_risk(u, it->second, options.params),
                   job_bin_quality(u)};
    if (mp.risk.degenerate_mds_baseline) ++result.degenerate_points;
    result.job_points.push_back(std::move(mp));
  }
  std::sort(result.job_points.begin(), result.job_points.end(),
            [](const MetricPoint& a, const MetricPoint& b) {
              if (a.risk.fs_id != b.risk.fs_id) return a.risk.fs_id < b.risk.fs_id;
              if (a.risk.bin_start != b.risk.bin_start)
                return a.risk.bin_start < b.risk.bin_start;
              return a.risk.subject < b.risk.subject;
            });

  // fs_totals is sorted by (fs, bin); walk both sequences together.
  std::vector<FsBinUsage> grid = fs_totals;
  std::sort(grid.begin(), grid.end(), [](const FsBinUsage& a, const FsBinUsage& b) {
    return std::tie(a.fs_id, a.bin_start) < std::tie(b.fs_id, b.bin_start);
  });
  std::span<const MetricPoint> jobs(result.job_points);
  std::size_t j = 0;
  for (const auto& cell : grid) {
    std::size_t k = j;
    while (k < jobs.size() && jobs[k].risk.fs_id == cell.fs_id &&
           jobs[k].risk.bin_start == cell.bin_start)
      ++k;
    MetricPoint fs;
    if (k > j) {
      fs = fs_bin_aggregate(jobs.subspan(j, k - j), options.quality_mode);
    } else {
      fs.risk.subject = fs.quality.subject = std::string(kFsSubject);
      fs.risk.fs_id = fs.quality.fs_id = cell.fs_id;
      fs.risk.bin_start = fs.quality.bin_start = cell.bin_start;
    }
    result.fs_points.push_back(std::move(fs));
    j = k;
    while (j < jobs.size() &&
           std::tie(jobs[j].risk.fs_id, jobs[j].risk.bin_start) <
               std::tie(cell.fs_id, cell.bin_start))
      ++j;
  }
  return result;
}

void write_risk_timeseries(std::ostream& out, const MetricsResult& metrics) {
  out << "fs,bin_start,subject,risk_oss,risk_mds,read_kb_ops,write_kb_ops\n";
  auto row = [&](const MetricPoint& p) {
    std::string line = csv::quote(p.risk.fs_id);
    line += ',' + std::to_string(p.risk.bin_start);
    line += ',' + csv::quote(p.risk.subject);
    line += ',' + csv::format_double(p.risk.risk_oss);
    line += ',' + csv::format_double(p.risk.risk_mds);
    line += ',' + csv::format_double(p.quality.read_kb_ops);
    line += ',' + csv::format_double(p.quality.write_kb_ops);
    line += '\n';
    out << line;
  };
  std::size_t j = 0;
  const auto& jobs = metrics.job_points;
  for (const auto& fs : metrics.fs_points) {
    row(fs);
    while (j < jobs.size() &&
           std::tie(jobs[j].risk.fs_id, jobs[j].risk.bin_start) <=
               std::tie(fs.risk.fs_id, fs.risk.bin_start)) {
      row(jobs[j]);
      ++j;
    }
  }
  for (; j < jobs.size(); ++j) row(jobs[j]);
}

std::vector<RiskRow> read_risk_timeseries(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      csv::chomp(line) !=
          "fs,bin_start,subject,risk_oss,risk_mds,read_kb_ops,write_kb_ops")
    throw ParseError(1, "", "schema error: not a risk time series");
  std::vector<RiskRow> rows;
  std::vector<std::string> f;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = csv::chomp(line);
    if (row.empty()) continue;
    if (!csv::split(row, f) || f.size() != 7)
      throw ParseError(line_no, "", "wrong field count");
    RiskRow r;
    r.fs_id = f[0];
    r.subject = f[2];
    if (!csv::parse_int(f[1], r.bin_start))
      throw ParseError(line_no, "bin_start", "not an integer");
    if (!csv::parse_double(f[3], r.risk_oss))
      throw ParseError(line_no, "risk_oss", "not a number");
    if (!csv::parse_double(f[4], r.risk_mds))
      throw ParseError(line_no, "risk_mds", "not a number");
    if (!csv::parse_double(f[5], r.read_kb_ops))
      throw ParseError(line_no, "read_kb_ops", "not a number");
    if (!csv::parse_double(f[6], r.write_kb_ops))
      throw ParseError(line_no, "write_kb_ops", "not a number");
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_baselines(std::ostream& out,
                     const std::map<std::string, FsBaseline>& baselines) {
  out << "fs,window_start,window_end,bins,md_total_avg";
  for (OpKind op : kAllOps) out << ",avg_" << op_name(op);
  out << '\n';
  for (const auto& [fs, b] : baselines) {
    out << csv::quote(fs) << ',' << b.window_start << ',' << b.window_end << ','
        << b.bins << ',' << csv::format_double(b.md_total_avg);
    for (double v : b.avg) out << ',' << csv::format_double(v);
    out << '\n';
  }
}

}  // namespace iorisk
