#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "iorisk/ingest.hpp"

namespace iorisk::simgen {

enum class IoPattern { StreamingWrite, SmallRead, MetadataStorm, TaskFarm, Idle };

std::string_view pattern_name(IoPattern p);
IoPattern parse_pattern(std::string_view name);

struct JobTemplate {
  std::string name;
  IoPattern pattern = IoPattern::Idle;
  std::size_t count = 1;
  std::string project = "general";
  /// Launch command shared by every run of the template; defaults to one
  /// derived from `name`.
  std::string command;
  std::size_t min_nodes = 1;
  std::size_t max_nodes = 1;
  std::size_t min_runtime_bins = 1;
  std::size_t max_runtime_bins = 1;
  /// Fraction of runs scripted to take `outlier_factor` times their drawn runtime.
  double outlier_fraction = 0.0;
  double outlier_factor = 2.0;
  /// Filesystems the pattern touches; empty means the first configured one.
  std::vector<std::string> filesystems;
  double intensity = 1.0;
  int cores_per_node = kDefaultCoresPerNode;
};

/// A job placed at a fixed time, using a template's pattern and command.
struct ExplicitJob {
  std::size_t template_index = 0;
  std::size_t nodes = 1;
  Timestamp start_offset = 0;  // seconds after the scenario start; bin aligned
  std::size_t runtime_bins = 1;
  bool scripted_outlier = false;
};

struct ContentionEpisode {
  Timestamp start_offset = 0;
  Timestamp end_offset = 0;
  double multiplier = 1.0;
  std::string fs_id;  // empty: every filesystem
};

struct ScenarioSpec {
  std::uint64_t seed = 1;
  Timestamp start_ts = 1'600'000'200;  // multiple of 360
  Timestamp duration = 86'400;
  Timestamp bin_width = kDefaultBinWidth;
  std::size_t node_count = 16;
  std::vector<std::string> filesystems = {"fs1"};
  std::vector<JobTemplate> templates;
  /// When non-empty, replaces template-driven job generation.
  std::vector<ExplicitJob> jobs;
  std::vector<ContentionEpisode> episodes;
  std::size_t resets = 0;
  bool background_noise = true;
  Timestamp probe_interval = 60;

  /// Throws std::invalid_argument on inconsistent specs.
  void validate() const;
};

struct LedgerJob {
  JobRecord record;
  std::string pattern;
  bool intended_slowdown = false;
  std::map<std::string, Counters> fs_totals;
  Counters totals{};
  std::string size_bin;
  std::string read_gib_bin;
  std::string write_gib_bin;
};

struct LedgerReset {
  std::string node_id;
  Timestamp ts = 0;
};

/// Exact totals of everything the generator emitted.
struct GroundTruthLedger {
  std::uint64_t seed = 0;
  Timestamp bin_width = kDefaultBinWidth;
  std::vector<LedgerJob> jobs;
  /// fs -> bin_start -> deltas summed over all nodes.
  std::map<std::string, std::map<Timestamp, Counters>> fs_bin_totals;
  std::map<std::string, Counters> fs_totals;
  std::map<std::string, Counters> unattributed_totals;
  std::vector<LedgerReset> resets;
  std::map<std::string, std::size_t> jobs_per_project;
  std::size_t sample_rows = 0;
};

/// Streams counters.csv, jobs.csv and (optionally) probe.csv. Identical
/// specs produce byte-identical output.
GroundTruthLedger generate(const ScenarioSpec& spec, std::ostream& counters,
                           std::ostream& jobs, std::ostream* probes = nullptr);

/// ledger.json.
std::string ledger_to_json(const GroundTruthLedger& ledger);
GroundTruthLedger ledger_from_json(const std::string& text);

/// Scenario files use the same JSON field names as ScenarioSpec.
ScenarioSpec scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioSpec& spec);

/// Built-in scenarios: "demo", "scale", "contention", "slowdown", "idle".
ScenarioSpec preset(std::string_view name, std::uint64_t seed);

}  // namespace iorisk::simgen
