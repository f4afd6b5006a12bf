// iorisk: filesystem counter telemetry -> per-job risk, quality and usage reports.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "iorisk/pipeline.hpp"
#include "iorisk/simgen.hpp"

namespace {

using iorisk::Config;

// Flags shared by the pipeline subcommands. Values are collected as strings
// and applied after the config file so that flags win.
struct PipelineFlags {
  std::map<std::string, std::string> values;
  bool pre_differenced = false;
  bool svg = false;
  bool quality_mean = false;
  std::string config_file;

  void attach(CLI::App* app) {
    static const char* kValued[][2] = {
        {"bin-width", "Bin width in seconds (default 360)"},
        {"alpha", "Risk scale for per-counter averages (default 2)"},
        {"beta", "Risk scale for the summed metadata average (default 0.25)"},
        {"md-threshold", "Scaled per-counter MDS average below which beta applies (default 1)"},
        {"slowdown-factor", "Runtime / group mean ratio flagged as slowdown (default 1.5)"},
        {"min-group", "Smallest application group checked for slowdown (default 3)"},
        {"scatter-min-risk", "Minimum avg risk_oss + risk_mds for scatter (default 25)"},
        {"cores-per-node", "Cores per node when jobs.csv leaves it empty (default 24)"},
        {"baseline-days", "Trailing baseline window in days (default: whole dataset)"},
        {"top-k", "Jobs broken out in daily time series (default 5)"},
        {"max-gap-bins", "Drop snapshot intervals longer than this many bins (default 3)"},
        {"day-offset", "Seconds after UTC midnight where report days start (default 0)"},
        {"out", "Output directory"},
        {"counters", "Counter feed (counters.csv)"},
        {"jobs", "Job feed (jobs.csv)"},
        {"probe", "Probe latency feed (ts,fs,latency_ms)"},
    };
    for (const auto& [name, help] : kValued) {
      std::string key = name;
      app->add_option_function<std::string>(
          "--" + key, [this, key](const std::string& v) { values[key] = v; }, help);
    }
    app->add_flag("--pre-differenced", pre_differenced,
                  "Counter feed holds per-interval deltas, not cumulative values");
    app->add_flag("--svg", svg, "Also render daily time series as SVG");
    app->add_flag("--quality-mean", quality_mean,
                  "Average (instead of sum) job quality in filesystem points");
    app->add_option("--config", config_file,
                    "key=value config file (default: $IORISK_CONFIG)");
  }

  Config resolve() const {
    Config config;
    std::string path = config_file;
    if (path.empty())
      if (const char* env = std::getenv(iorisk::kConfigEnv)) path = env;
    if (!path.empty()) iorisk::load_config_file(path, config);
    for (const auto& [k, v] : values) config.set(k, v);
    if (pre_differenced) config.pre_differenced = true;
    if (svg) config.svg = true;
    if (quality_mean) config.quality_mean = true;
    config.validate();
    return config;
  }
};

int report(const iorisk::StageReport& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "wrote " << r.written.size() << " files\n";
  return 0;
}

int simulate(const std::string& preset, const std::string& scenario_file,
             std::uint64_t seed, bool seed_given, const std::string& out) {
  namespace sg = iorisk::simgen;
  sg::ScenarioSpec spec;
  if (!scenario_file.empty()) {
    std::ifstream in(scenario_file);
    if (!in) throw iorisk::PipelineError("cannot open scenario file " + scenario_file);
    std::stringstream buf;
    buf << in.rdbuf();
    spec = sg::scenario_from_json(buf.str());
    if (seed_given) spec.seed = seed;
  } else {
    spec = sg::preset(preset, seed);
  }
  const std::filesystem::path dir(out);
  std::filesystem::create_directories(dir);
  std::ofstream counters(dir / "counters.csv", std::ios::binary);
  std::ofstream jobs(dir / "jobs.csv", std::ios::binary);
  std::ofstream probe(dir / "probe.csv", std::ios::binary);
  if (!counters || !jobs || !probe)
    throw iorisk::PipelineError("cannot write simulation output under " + out);
  const auto ledger = sg::generate(spec, counters, jobs, &probe);
  std::ofstream(dir / "ledger.json", std::ios::binary) << sg::ledger_to_json(ledger);
  std::ofstream(dir / "scenario.json", std::ios::binary) << sg::scenario_to_json(spec);
  std::cerr << "generated " << ledger.jobs.size() << " jobs, " << ledger.sample_rows
            << " counter rows in " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iorisk: per-job I/O risk and usage analysis for parallel filesystems"};
  app.require_subcommand(1);

  PipelineFlags ingest_flags, analyze_flags, report_flags, all_flags;
  auto* ingest = app.add_subcommand("ingest", "Parse feeds, bin counters, attribute to jobs");
  auto* analyze = app.add_subcommand("analyze", "Compute risk/quality metrics and job analytics");
  auto* rep = app.add_subcommand("report", "Emit heatmaps, breakdown, daily series, correlation");
  auto* all = app.add_subcommand("all", "ingest + analyze + report");
  ingest_flags.attach(ingest);
  analyze_flags.attach(analyze);
  report_flags.attach(rep);
  all_flags.attach(all);

  auto* sim = app.add_subcommand("simulate", "Generate synthetic feeds and a ground-truth ledger");
  std::string preset = "demo", scenario_file, sim_out = "sim";
  std::uint64_t seed = 1;
  sim->add_option("--preset", preset, "demo | scale | contention | slowdown | idle");
  sim->add_option("--scenario", scenario_file, "Scenario JSON file (overrides --preset)");
  auto* seed_opt = sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--out", sim_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*ingest) return report(iorisk::run_ingest(ingest_flags.resolve()));
    if (*analyze) return report(iorisk::run_analyze(analyze_flags.resolve()));
    if (*rep) return report(iorisk::run_report(report_flags.resolve()));
    if (*all) return report(iorisk::run_all(all_flags.resolve()));
    if (*sim) return simulate(preset, scenario_file, seed, seed_opt->count() > 0, sim_out);
  } catch (const std::exception& e) {
    std::cerr << "iorisk: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
