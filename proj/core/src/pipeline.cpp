#include "iorisk/pipeline.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "iorisk/analytics.hpp"
#include "iorisk/attribute.hpp"
#include "iorisk/ingest.hpp"
#include "iorisk/metrics.hpp"
#include "iorisk/report.hpp"
#include "iorisk/svg.hpp"

namespace iorisk {
namespace fs = std::filesystem;

OutputLayout::OutputLayout(fs::path r)
    : root(std::move(r)),
      store(root / "store"),
      manifest(store / "manifest.txt"),
      store_jobs(store / "jobs.csv"),
      node_usage(store / "node_usage.csv"),
      job_usage(store / "job_usage.csv"),
      fs_totals(store / "fs_totals.csv"),
      unattributed(root / "unattributed.csv"),
      baseline(root / "baseline.csv"),
      risk(root / "risk_timeseries.csv"),
      job_summary(root / "job_summary.csv"),
      scatter(root / "scatter.csv"),
      slowdown(root / "slowdown.csv"),
      breakdown(root / "breakdown.csv"),
      timeseries(root / "timeseries"),
      correlation(root / "correlation.csv") {}

fs::path OutputLayout::heatmap_csv(std::string_view measure) const {
  return root / ("heatmap_" + std::string(measure) + ".csv");
}

fs::path OutputLayout::heatmap_svg(std::string_view measure) const {
  return root / ("heatmap_" + std::string(measure) + ".svg");
}

namespace {

std::ifstream open_input(const fs::path& path, const char* what) {
  if (path.empty()) throw PipelineError(std::string("no ") + what + " file given");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PipelineError(std::string("cannot open ") + what + " file " + path.string());
  return in;
}

template <typename Writer>
void write_output(const fs::path& path, StageReport& report, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PipelineError("cannot write " + path.string());
  writer(out);
  out.flush();
  if (!out) throw PipelineError("error writing " + path.string());
  report.written.push_back(path);
}

std::map<std::string, std::string> read_manifest(const OutputLayout& layout) {
  auto in = open_input(layout.manifest, "store manifest");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

void check_store(const Config& config, const OutputLayout& layout) {
  auto kv = read_manifest(layout);
  if (kv["bin_width"] != std::to_string(config.bin_width_s))
    throw PipelineError("store was binned at " + kv["bin_width"] +
                        " s but the configured bin width is " +
                        std::to_string(config.bin_width_s) + " s; rerun ingest");
}

template <typename T, typename Reader>
T read_file(const fs::path& path, const char* what, Reader reader) {
  auto in = open_input(path, what);
  try {
    return reader(in);
  } catch (const ParseError& e) {
    throw PipelineError(path.string() + ": " + e.what());
  }
}

}  // namespace

StageReport run_ingest(const Config& config) {
  config.validate();
  const OutputLayout layout(config.out);
  StageReport report;

  auto samples = read_file<std::vector<CounterSample>>(
      config.counters, "counters", [](std::istream& in) { return parse_counter_feed(in); });
  FeedOptions feed;
  feed.default_cores_per_node = config.cores_per_node;
  auto jobs = read_file<std::vector<JobRecord>>(
      config.jobs, "jobs", [&](std::istream& in) { return parse_job_feed(in, feed); });

  BinningOptions binning;
  binning.bin_width = config.bin_width_s;
  binning.max_gap_bins = config.max_gap_bins;
  binning.pre_differenced = config.pre_differenced;
  auto node_usage = deltify_and_bin(std::move(samples), binning);
  auto attributed = attribute_usage(node_usage, jobs, config.bin_width_s);
  auto totals = sum_by_fs_bin(node_usage);

  fs::create_directories(layout.store);
  write_output(layout.manifest, report, [&](std::ostream& o) {
    o << "bin_width=" << config.bin_width_s << '\n'
      << "pre_differenced=" << (config.pre_differenced ? 1 : 0) << '\n'
      << "max_gap_bins=" << config.max_gap_bins << '\n';
  });
  write_output(layout.store_jobs, report, [&](std::ostream& o) { write_job_feed(o, jobs); });
  write_output(layout.node_usage, report,
               [&](std::ostream& o) { write_node_usage(o, node_usage); });
  write_output(layout.job_usage, report,
               [&](std::ostream& o) { write_job_usage(o, attributed.job_usage); });
  write_output(layout.fs_totals, report, [&](std::ostream& o) { write_fs_usage(o, totals); });
  write_output(layout.unattributed, report,
               [&](std::ostream& o) { write_fs_usage(o, attributed.unattributed); });
  return report;
}

StageReport run_analyze(const Config& config) {
  config.validate();
  const OutputLayout layout(config.out);
  check_store(config, layout);
  StageReport report;

  auto jobs = read_file<std::vector<JobRecord>>(
      layout.store_jobs, "store jobs", [](std::istream& in) { return parse_job_feed(in); });
  auto job_usage = read_file<std::vector<JobBinUsage>>(
      layout.job_usage, "store job usage", [](std::istream& in) { return read_job_usage(in); });
  auto totals = read_file<std::vector<FsBinUsage>>(
      layout.fs_totals, "store fs totals", [](std::istream& in) { return read_fs_usage(in); });

  MetricsOptions mo;
  mo.params = {config.alpha, config.beta, config.md_small_avg_threshold};
  mo.bin_width = config.bin_width_s;
  mo.baseline_days = config.baseline_days;
  mo.quality_mode = config.quality_mean ? QualityAggregation::Mean : QualityAggregation::Sum;
  auto metrics = compute_metrics(job_usage, totals, mo);
  if (metrics.degenerate_points > 0)
    report.warnings.push_back(std::to_string(metrics.degenerate_points) +
                              " job-bins scored against a zero metadata baseline");

  write_output(layout.baseline, report,
               [&](std::ostream& o) { write_baselines(o, metrics.baselines); });
  write_output(layout.risk, report, [&](std::ostream& o) { write_risk_timeseries(o, metrics); });

  auto summaries = summarize_jobs(jobs, job_usage);
  write_output(layout.job_summary, report,
               [&](std::ostream& o) { write_job_summary(o, summaries); });

  auto scatter = build_scatter(jobs, metrics.job_points, job_usage, config.bin_width_s,
                               config.scatter_min_risk);
  write_output(layout.scatter, report, [&](std::ostream& o) { write_scatter(o, scatter); });

  auto findings = detect_slowdown(group_applications(jobs), config.slowdown_factor,
                                  config.min_group);
  write_output(layout.slowdown, report, [&](std::ostream& o) { write_slowdown(o, findings); });
  return report;
}

StageReport run_report(const Config& config) {
  config.validate();
  const OutputLayout layout(config.out);
  check_store(config, layout);
  StageReport report;

  auto rows = read_file<std::vector<RiskRow>>(
      layout.risk, "risk time series", [](std::istream& in) { return read_risk_timeseries(in); });
  auto summaries = read_file<std::vector<JobIoSummary>>(
      layout.job_summary, "job summary", [](std::istream& in) { return read_job_summary(in); });

  if (summaries.empty()) {
    report.warnings.push_back("no jobs: heatmaps and breakdown skipped");
  } else {
    for (HeatmapMeasure m : kAllMeasures) {
      const Heatmap h = build_heatmap(summaries, m);
      write_output(layout.heatmap_csv(measure_name(m)), report,
                   [&](std::ostream& o) { write_heatmap(o, h); });
      write_output(layout.heatmap_svg(measure_name(m)), report,
                   [&](std::ostream& o) { o << render_heatmap_svg(h); });
    }
    const auto table = build_breakdown(summaries);
    write_output(layout.breakdown, report, [&](std::ostream& o) { write_breakdown(o, table); });
  }

  fs::remove_all(layout.timeseries);
  TimeseriesOptions ts;
  ts.top_k = config.top_k;
  ts.bin_width = config.bin_width_s;
  ts.day_offset = config.day_offset_s;
  ts.svg = config.svg;
  for (auto& p : emit_timeseries(rows, layout.timeseries, ts)) report.written.push_back(p);

  if (!config.probe.empty()) {
    auto probes = read_file<std::vector<ProbeSample>>(
        config.probe, "probe", [](std::istream& in) { return parse_probe_feed(in); });
    std::map<std::string, TimeSeries> by_fs;
    for (const auto& p : probes) by_fs[p.fs_id].push_back({p.ts, p.latency_ms});
    write_output(layout.correlation, report, [&](std::ostream& o) {
      o << "fs,lag_bins,overlap_bins,pearson\n";
      for (const auto& [fs_id, series] : by_fs) {
        const auto probe_bins = resample_mean(series, config.bin_width_s);
        const auto risk = fs_risk_series(rows, fs_id);
        try {
          const auto c = correlate_series(risk, probe_bins, 0, config.bin_width_s);
          o << csv::quote(fs_id) << ",0," << c.overlap << ','
            << (c.pearson ? csv::format_double(*c.pearson) : std::string("undefined")) << '\n';
        } catch (const std::invalid_argument& e) {
          report.warnings.push_back("correlation for " + fs_id + ": " + e.what());
          o << csv::quote(fs_id) << ",0,0,undefined\n";
        }
      }
    });
  }
  return report;
}

StageReport run_all(const Config& config) {
  StageReport all;
  for (auto stage : {run_ingest, run_analyze, run_report}) {
    auto r = stage(config);
    all.written.insert(all.written.end(), r.written.begin(), r.written.end());
    all.warnings.insert(all.warnings.end(), r.warnings.begin(), r.warnings.end());
  }
  return all;
}

}  // namespace iorisk
