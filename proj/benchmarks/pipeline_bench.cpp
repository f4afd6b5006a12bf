#include <benchmark/benchmark.h>

#include <sstream>

#include "iorisk/analytics.hpp"
#include "iorisk/report.hpp"
#include "iorisk/simgen.hpp"

namespace {

using namespace iorisk;

// Demo-preset feeds, generated once and shared by every benchmark.
struct Dataset {
  std::vector<CounterSample> samples;
  std::vector<JobRecord> jobs;
  std::vector<BinnedNodeUsage> binned;
  AttributionResult attributed;
  std::vector<FsBinUsage> totals;
  std::string counters_csv;

  Dataset() {
    std::ostringstream c, j;
    simgen::generate(simgen::preset("demo", 1), c, j);
    counters_csv = c.str();
    std::istringstream ci(counters_csv), ji(j.str());
    samples = parse_counter_feed(ci);
    jobs = parse_job_feed(ji);
    binned = deltify_and_bin(samples);
    attributed = attribute_usage(binned, jobs);
    totals = sum_by_fs_bin(binned);
  }
};

const Dataset& data() {
  static const Dataset d;
  return d;
}

void BM_ParseCounters(benchmark::State& state) {
  const auto& d = data();
  for (auto _ : state) {
    std::istringstream in(d.counters_csv);
    benchmark::DoNotOptimize(parse_counter_feed(in));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.samples.size()));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(d.counters_csv.size()));
}
BENCHMARK(BM_ParseCounters)->Unit(benchmark::kMillisecond);

void BM_Deltify(benchmark::State& state) {
  const auto& d = data();
  for (auto _ : state) benchmark::DoNotOptimize(deltify_and_bin(d.samples));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.samples.size()));
}
BENCHMARK(BM_Deltify)->Unit(benchmark::kMillisecond);

void BM_Attribute(benchmark::State& state) {
  const auto& d = data();
  for (auto _ : state) benchmark::DoNotOptimize(attribute_usage(d.binned, d.jobs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.binned.size()));
}
BENCHMARK(BM_Attribute)->Unit(benchmark::kMillisecond);

void BM_Metrics(benchmark::State& state) {
  const auto& d = data();
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_metrics(d.attributed.job_usage, d.totals));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(d.attributed.job_usage.size()));
}
BENCHMARK(BM_Metrics)->Unit(benchmark::kMillisecond);

void BM_Heatmap(benchmark::State& state) {
  const auto& d = data();
  const auto summaries = summarize_jobs(d.jobs, d.attributed.job_usage);
  for (auto _ : state)
    for (HeatmapMeasure m : kAllMeasures) benchmark::DoNotOptimize(build_heatmap(summaries, m));
}
BENCHMARK(BM_Heatmap)->Unit(benchmark::kMicrosecond);

void BM_Apportion(benchmark::State& state) {
  std::vector<std::int64_t> weights(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = 1 + static_cast<std::int64_t>(i % 7);
  for (auto _ : state) benchmark::DoNotOptimize(apportion(987'654'321, weights));
}
BENCHMARK(BM_Apportion)->Arg(2)->Arg(8)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
