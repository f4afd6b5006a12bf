#include "iorisk/report.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "iorisk/svg.hpp"

namespace iorisk {

std::string_view measure_name(HeatmapMeasure m) {
  switch (m) {
    case HeatmapMeasure::ReadGib: return "read_gib";
    case HeatmapMeasure::WriteGib: return "write_gib";
    case HeatmapMeasure::MeanReadOpsS: return "mean_read_ops_s";
    case HeatmapMeasure::MeanWriteOpsS: return "mean_write_ops_s";
  }
  return "unknown";
}

HeatmapMeasure parse_measure(std::string_view name) {
  for (HeatmapMeasure m : kAllMeasures)
    if (measure_name(m) == name) return m;
  throw std::invalid_argument("unknown heatmap measure '" + std::string(name) + "'");
}

double measure_value(const JobIoSummary& s, HeatmapMeasure m) {
  switch (m) {
    case HeatmapMeasure::ReadGib: return s.read_gib;
    case HeatmapMeasure::WriteGib: return s.write_gib;
    case HeatmapMeasure::MeanReadOpsS: return s.mean_read_ops_s;
    case HeatmapMeasure::MeanWriteOpsS: return s.mean_write_ops_s;
  }
  throw std::invalid_argument("unknown heatmap measure");
}

int size_row(std::size_t nodes) {
  if (nodes == 0) throw std::invalid_argument("job with no nodes");
  if (nodes == 1) return 0;
  return static_cast<int>(std::bit_width(nodes - 1));
}

std::optional<int> measure_exponent(double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw std::invalid_argument("measure must be finite and non-negative");
  if (value == 0.0) return std::nullopt;
  int e = 0;
  double m = std::frexp(value, &e);
  return m == 0.5 ? e - 1 : e;
}

int Heatmap::column_of(double value) const {
  auto k = measure_exponent(value);
  if (!k) return 0;
  if (*k < min_exp || *k > max_exp)
    throw std::out_of_range("value outside heatmap columns");
  return 1 + (*k - min_exp);
}

std::int64_t Heatmap::total_core_seconds() const {
  std::int64_t total = 0;
  for (const auto& row : core_seconds)
    for (std::int64_t v : row) total += v;
  return total;
}

std::string size_bin_label(int row) {
  if (row == 0) return "1";
  if (row == 1) return "2";
  const std::int64_t hi = std::int64_t{1} << row;
  return std::to_string(hi / 2 + 1) + "-" + std::to_string(hi);
}

std::string measure_bin_label(std::optional<int> exponent) {
  if (!exponent) return "0";
  const int k = *exponent;
  return "(" + csv::format_double(std::ldexp(1.0, k - 1)) + "," +
         csv::format_double(std::ldexp(1.0, k)) + "]";
}

std::string Heatmap::row_label(int row) const { return size_bin_label(row); }

std::string Heatmap::col_label(int col) const {
  if (col == 0) return measure_bin_label(std::nullopt);
  return measure_bin_label(min_exp + col - 1);
}

Heatmap build_heatmap(const std::vector<JobIoSummary>& summaries,
                      HeatmapMeasure measure) {
  if (summaries.empty()) throw std::invalid_argument("heatmap: no jobs");
  Heatmap h;
  h.measure = measure;
  bool any = false;
  for (const auto& s : summaries) {
    h.rows = std::max(h.rows, size_row(s.nodes_count) + 1);
    if (auto k = measure_exponent(measure_value(s, measure))) {
      h.min_exp = any ? std::min(h.min_exp, *k) : *k;
      h.max_exp = any ? std::max(h.max_exp, *k) : *k;
      any = true;
    }
  }
  h.core_seconds.assign(h.rows, std::vector<std::int64_t>(h.cols(), 0));
  for (const auto& s : summaries)
    h.core_seconds[size_row(s.nodes_count)][h.column_of(measure_value(s, measure))] +=
        s.core_seconds;
  return h;
}

void write_heatmap(std::ostream& out, const Heatmap& h) {
  out << "measure,size_bin,measure_bin,core_h\n";
  for (int r = 0; r < h.rows; ++r)
    for (int c = 0; c < h.cols(); ++c)
      out << measure_name(h.measure) << ',' << h.row_label(r) << ','
          << csv::quote(h.col_label(c)) << ',' << csv::format_double(h.core_h(r, c))
          << '\n';
}

std::size_t breakdown_bin(double gib) {
  std::size_t bin = 0;
  while (bin < kBreakdownEdgesGib.size() && gib >= kBreakdownEdgesGib[bin]) ++bin;
  return bin;
}

BreakdownTable build_breakdown(const std::vector<JobIoSummary>& summaries) {
  BreakdownTable t;
  std::int64_t total = 0;
  for (const auto& s : summaries) {
    t.read_core_seconds[breakdown_bin(s.read_gib)] += s.core_seconds;
    t.write_core_seconds[breakdown_bin(s.write_gib)] += s.core_seconds;
    total += s.core_seconds;
  }
  if (total <= 0) throw std::invalid_argument("breakdown: total core-h is zero");
  for (std::size_t i = 0; i < 5; ++i) {
    t.read_pct[i] = 100.0 * static_cast<double>(t.read_core_seconds[i]) /
                    static_cast<double>(total);
    t.write_pct[i] = 100.0 * static_cast<double>(t.write_core_seconds[i]) /
                     static_cast<double>(total);
  }
  return t;
}

void write_breakdown(std::ostream& out, const BreakdownTable& t) {
  out << "total_gib,read_pct,write_pct\n";
  for (std::size_t i = 0; i < 5; ++i)
    out << csv::quote(kBreakdownLabels[i]) << ',' << csv::format_double(t.read_pct[i])
        << ',' << csv::format_double(t.write_pct[i]) << '\n';
}

std::string day_label(Timestamp day_start, Timestamp offset) {
  using namespace std::chrono;
  const sys_days d{days{floor_div(day_start - offset, 86400)}};
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::vector<DailySeries> build_daily_series(const std::vector<RiskRow>& rows,
                                            const std::string& fs_id,
                                            const TimeseriesOptions& options) {
  constexpr Timestamp kDay = 86400;
  auto day_of = [&](Timestamp t) {
    return floor_div(t - options.day_offset, kDay) * kDay + options.day_offset;
  };

  std::map<Timestamp, std::pair<double, double>> totals;
  std::map<Timestamp, std::vector<const RiskRow*>> job_rows;
  for (const auto& r : rows) {
    if (r.fs_id != fs_id) continue;
    if (r.subject == kFsSubject)
      totals[r.bin_start] = {r.risk_oss, r.risk_mds};
    else
      job_rows[r.bin_start].push_back(&r);
  }
  std::vector<DailySeries> out;
  if (totals.empty()) return out;

  const Timestamp first_day = day_of(totals.begin()->first);
  const Timestamp last_day = day_of(totals.rbegin()->first);
  for (Timestamp day = first_day; day <= last_day; day += kDay) {
    DailySeries s;
    s.fs_id = fs_id;
    s.day_start = day;
    auto lo = totals.lower_bound(day);
    auto hi = totals.lower_bound(day + kDay);
    for (auto it = lo; it != hi; ++it) s.bins.push_back(it->first);

    std::map<std::string_view, double> integrated;
    for (Timestamp b : s.bins)
      for (const RiskRow* r : job_rows[b]) integrated[r->subject] += r->risk_oss + r->risk_mds;
    std::vector<std::pair<std::string_view, double>> ranked(integrated.begin(),
                                                            integrated.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > options.top_k) ranked.resize(options.top_k);
    std::unordered_map<std::string_view, std::size_t> slot;
    for (const auto& [job, score] : ranked) {
      slot[job] = s.top_jobs.size();
      s.top_jobs.emplace_back(job);
    }

    const std::size_t n = s.bins.size();
    s.total_oss.assign(n, 0.0);
    s.total_mds.assign(n, 0.0);
    s.other_oss.assign(n, 0.0);
    s.other_mds.assign(n, 0.0);
    s.job_oss.assign(s.top_jobs.size(), std::vector<double>(n, 0.0));
    s.job_mds.assign(s.top_jobs.size(), std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      std::tie(s.total_oss[i], s.total_mds[i]) = totals[s.bins[i]];
      for (const RiskRow* r : job_rows[s.bins[i]]) {
        auto it = slot.find(r->subject);
        if (it != slot.end()) {
          s.job_oss[it->second][i] += r->risk_oss;
          s.job_mds[it->second][i] += r->risk_mds;
        } else {
          s.other_oss[i] += r->risk_oss;
          s.other_mds[i] += r->risk_mds;
        }
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_daily_series(std::ostream& out, const DailySeries& s) {
  out << "bin_start,series,risk_oss,risk_mds\n";
  for (std::size_t i = 0; i < s.bins.size(); ++i) {
    out << s.bins[i] << ",__total__," << csv::format_double(s.total_oss[i]) << ','
        << csv::format_double(s.total_mds[i]) << '\n';
    for (std::size_t j = 0; j < s.top_jobs.size(); ++j)
      out << s.bins[i] << ',' << csv::quote(s.top_jobs[j]) << ','
          << csv::format_double(s.job_oss[j][i]) << ','
          << csv::format_double(s.job_mds[j][i]) << '\n';
    out << s.bins[i] << ",__other__," << csv::format_double(s.other_oss[i]) << ','
        << csv::format_double(s.other_mds[i]) << '\n';
  }
}

namespace {

std::string file_safe(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

}  // namespace

std::vector<std::filesystem::path> emit_timeseries(const std::vector<RiskRow>& rows,
                                                   const std::filesystem::path& dir,
                                                   const TimeseriesOptions& options) {
  std::filesystem::create_directories(dir);
  std::set<std::string> filesystems;
  for (const auto& r : rows) filesystems.insert(r.fs_id);

  std::vector<std::filesystem::path> written;
  for (const auto& fs : filesystems) {
    for (const auto& series : build_daily_series(rows, fs, options)) {
      const std::string stem =
          file_safe(fs) + "_" + day_label(series.day_start, options.day_offset);
      auto csv_path = dir / (stem + ".csv");
      std::ofstream f(csv_path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + csv_path.string());
      write_daily_series(f, series);
      written.push_back(csv_path);
      if (options.svg) {
        auto svg_path = dir / (stem + ".svg");
        write_file(svg_path, render_daily_svg(series));
        written.push_back(svg_path);
      }
    }
  }
  return written;
}

TimeSeries resample_mean(const TimeSeries& series, Timestamp bin_width) {
  if (bin_width <= 0) throw std::invalid_argument("bin width must be positive");
  std::map<Timestamp, std::pair<double, std::size_t>> acc;
  for (const auto& s : series) {
    auto& a = acc[bin_floor(s.ts, bin_width)];
    a.first += s.value;
    ++a.second;
  }
  TimeSeries out;
  out.reserve(acc.size());
  for (const auto& [bin, a] : acc)
    out.push_back({bin, a.first / static_cast<double>(a.second)});
  return out;
}

Correlation correlate_series(const TimeSeries& a, const TimeSeries& b, int lag,
                             Timestamp bin_width) {
  std::map<Timestamp, double> bmap;
  for (const auto& s : b) bmap[s.ts] = s.value;
  std::vector<double> xs, ys;
  for (const auto& s : a) {
    auto it = bmap.find(s.ts + static_cast<Timestamp>(lag) * bin_width);
    if (it == bmap.end()) continue;
    xs.push_back(s.value);
    ys.push_back(it->second);
  }
  Correlation c;
  c.overlap = xs.size();
  if (c.overlap < 3)
    throw std::invalid_argument("correlation needs at least 3 overlapping bins, have " +
                                std::to_string(c.overlap));
  const double n = static_cast<double>(c.overlap);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return c;
  c.pearson = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return c;
}

std::vector<ProbeSample> parse_probe_feed(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::chomp(line) != kProbeHeader)
    throw ParseError(1, "", "schema error: expected header '" +
                                std::string(kProbeHeader) + "'");
  std::vector<ProbeSample> out;
  std::vector<std::string> f;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = csv::chomp(line);
    if (row.empty()) continue;
    if (!csv::split(row, f) || f.size() != 3)
      throw ParseError(line_no, "", "expected 3 fields");
    ProbeSample p;
    if (!csv::parse_int(f[0], p.ts)) throw ParseError(line_no, "ts", "not an integer");
    p.fs_id = f[1];
    if (!csv::parse_double(f[2], p.latency_ms))
      throw ParseError(line_no, "latency_ms", "not a number");
    out.push_back(std::move(p));
  }
  return out;
}

void write_probe_feed(std::ostream& out, const std::vector<ProbeSample>& samples) {
  out << kProbeHeader << '\n';
  for (const auto& p : samples)
    out << p.ts << ',' << csv::quote(p.fs_id) << ','
        << csv::format_double(p.latency_ms) << '\n';
}

TimeSeries fs_risk_series(const std::vector<RiskRow>& rows, const std::string& fs_id) {
  TimeSeries out;
  for (const auto& r : rows)
    if (r.fs_id == fs_id && r.subject == kFsSubject)
      out.push_back({r.bin_start, r.risk_oss + r.risk_mds});
  std::sort(out.begin(), out.end(),
            [](const SeriesSample& x, const SeriesSample& y) { return x.ts < y.ts; });
  return out;
}

}  // namespace iorisk
