#include "iorisk/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "iorisk/analytics.hpp"
#include "iorisk/report.hpp"
#include "json.hpp"

namespace iorisk::simgen {
namespace {

using nlohmann::json;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Sequential generator for placement decisions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed)) {}
  std::uint64_t next() { return splitmix(state_++); }
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {  // inclusive
    return lo + next() % (hi - lo + 1);
  }

 private:
  std::uint64_t state_;
};

// Counter-based stream: the same key always yields the same draws, so the
// emitted feed does not depend on iteration order.
class KeyedDraw {
 public:
  KeyedDraw(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
    state_ = splitmix(seed);
    for (std::uint64_t k : key) state_ = splitmix(state_ ^ k);
  }
  Count uniform(Count lo, Count hi) {
    return lo + static_cast<Count>(splitmix(state_++) %
                                   static_cast<std::uint64_t>(hi - lo + 1));
  }
  double unit() {
    return static_cast<double>(splitmix(state_++) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

Count scaled(double factor, Count v) {
  return static_cast<Count>(std::llround(factor * static_cast<double>(v)));
}

void set(Counters& c, OpKind op, Count v) { c[index(op)] = v; }

Counters pattern_delta(IoPattern pattern, double factor, KeyedDraw& d) {
  Counters c{};
  switch (pattern) {
    case IoPattern::StreamingWrite: {
      const Count ops = scaled(factor, d.uniform(200, 400));
      set(c, OpKind::WriteOps, ops);
      set(c, OpKind::WriteKb, ops * 1024);
      set(c, OpKind::Other, d.uniform(0, 2));
      set(c, OpKind::Open, d.uniform(1, 3));
      set(c, OpKind::Close, d.uniform(1, 3));
      set(c, OpKind::Getattr, d.uniform(2, 6));
      break;
    }
    case IoPattern::SmallRead: {
      const Count ops = scaled(factor, d.uniform(2000, 4000));
      set(c, OpKind::ReadOps, ops);
      set(c, OpKind::ReadKb, ops * 4);
      set(c, OpKind::Other, d.uniform(0, 2));
      set(c, OpKind::Open, scaled(factor, d.uniform(10, 40)));
      set(c, OpKind::Close, scaled(factor, d.uniform(10, 40)));
      set(c, OpKind::Getattr, scaled(factor, d.uniform(20, 60)));
      break;
    }
    case IoPattern::MetadataStorm: {
      set(c, OpKind::Mkdir, scaled(factor, d.uniform(300, 600)));
      set(c, OpKind::Rmdir, scaled(factor, d.uniform(50, 150)));
      set(c, OpKind::Open, scaled(factor, d.uniform(500, 1000)));
      set(c, OpKind::Close, scaled(factor, d.uniform(500, 1000)));
      set(c, OpKind::Mknod, scaled(factor, d.uniform(100, 300)));
      set(c, OpKind::Unlink, scaled(factor, d.uniform(100, 300)));
      set(c, OpKind::Getattr, scaled(factor, d.uniform(1000, 2000)));
      set(c, OpKind::Setattr, scaled(factor, d.uniform(50, 200)));
      set(c, OpKind::Ren, scaled(factor, d.uniform(10, 50)));
      set(c, OpKind::Statfs, d.uniform(1, 5));
      const Count ops = d.uniform(10, 20);
      set(c, OpKind::WriteOps, ops);
      set(c, OpKind::WriteKb, ops * 8);
      break;
    }
    case IoPattern::TaskFarm: {
      set(c, OpKind::Open, scaled(factor, d.uniform(50, 100)));
      set(c, OpKind::Close, scaled(factor, d.uniform(50, 100)));
      set(c, OpKind::Getattr, scaled(factor, d.uniform(100, 200)));
      set(c, OpKind::Getxattr, scaled(factor, d.uniform(5, 20)));
      set(c, OpKind::Statfs, d.uniform(1, 5));
      const Count rops = scaled(factor, d.uniform(20, 50));
      set(c, OpKind::ReadOps, rops);
      set(c, OpKind::ReadKb, rops * 64);
      const Count wops = scaled(factor, d.uniform(10, 30));
      set(c, OpKind::WriteOps, wops);
      set(c, OpKind::WriteKb, wops * 32);
      set(c, OpKind::Sync, d.uniform(0, 2));
      break;
    }
    case IoPattern::Idle:
      break;
  }
  return c;
}

struct Planned {
  std::size_t tmpl = 0;
  std::size_t nodes = 1;
  std::size_t runtime_bins = 1;
  std::int64_t start_bin = 0;
  bool outlier = false;
  std::size_t order = 0;
  std::vector<std::size_t> node_ids;
};

std::string node_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "nid%05zu", i);
  return buf;
}

std::string job_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "j%06zu", i);
  return buf;
}

std::string command_for(const JobTemplate& t) {
  if (!t.command.empty()) return t.command;
  return "./" + t.name + " -in " + t.name + ".in";
}

std::vector<Planned> plan_jobs(const ScenarioSpec& spec) {
  const std::int64_t total_bins = spec.duration / spec.bin_width;
  std::vector<Planned> planned;
  Rng rng(spec.seed);

  if (!spec.jobs.empty()) {
    for (std::size_t i = 0; i < spec.jobs.size(); ++i) {
      const auto& e = spec.jobs[i];
      if (e.template_index >= spec.templates.size())
        throw std::invalid_argument("explicit job references a missing template");
      if (e.start_offset % spec.bin_width != 0)
        throw std::invalid_argument("explicit job start is not bin aligned");
      Planned p;
      p.tmpl = e.template_index;
      p.nodes = e.nodes;
      p.runtime_bins = e.runtime_bins;
      p.start_bin = e.start_offset / spec.bin_width;
      p.outlier = e.scripted_outlier;
      p.order = i;
      planned.push_back(p);
    }
    std::stable_sort(planned.begin(), planned.end(),
                     [](const Planned& a, const Planned& b) { return a.start_bin < b.start_bin; });
    std::vector<std::int64_t> free_at(spec.node_count, 0);
    for (auto& p : planned) {
      if (p.start_bin + static_cast<std::int64_t>(p.runtime_bins) > total_bins)
        throw std::invalid_argument("explicit job runs past the scenario end");
      for (std::size_t n = 0; n < spec.node_count && p.node_ids.size() < p.nodes; ++n)
        if (free_at[n] <= p.start_bin) p.node_ids.push_back(n);
      if (p.node_ids.size() < p.nodes)
        throw std::invalid_argument("scenario has more concurrent jobs than nodes");
      for (std::size_t n : p.node_ids)
        free_at[n] = p.start_bin + static_cast<std::int64_t>(p.runtime_bins);
    }
    return planned;
  }

  std::size_t order = 0;
  for (std::size_t t = 0; t < spec.templates.size(); ++t) {
    const auto& tmpl = spec.templates[t];
    std::vector<bool> outlier(tmpl.count, false);
    auto outliers = static_cast<std::size_t>(
        std::floor(tmpl.outlier_fraction * static_cast<double>(tmpl.count)));
    std::vector<std::size_t> idx(tmpl.count);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < outliers; ++i) {
      std::size_t j = i + rng.uniform(0, tmpl.count - 1 - i);
      std::swap(idx[i], idx[j]);
      outlier[idx[i]] = true;
    }
    for (std::size_t i = 0; i < tmpl.count; ++i) {
      Planned p;
      p.tmpl = t;
      p.order = order++;
      p.nodes = rng.uniform(tmpl.min_nodes, tmpl.max_nodes);
      p.runtime_bins = rng.uniform(tmpl.min_runtime_bins, tmpl.max_runtime_bins);
      p.outlier = outlier[i];
      if (p.outlier)
        p.runtime_bins = static_cast<std::size_t>(
            std::llround(tmpl.outlier_factor * static_cast<double>(p.runtime_bins)));
      if (static_cast<std::int64_t>(p.runtime_bins) > total_bins)
        throw std::invalid_argument("template runtime exceeds scenario duration");
      p.start_bin = static_cast<std::int64_t>(
          rng.uniform(0, static_cast<std::uint64_t>(total_bins) - p.runtime_bins));
      planned.push_back(p);
    }
  }
  std::stable_sort(planned.begin(), planned.end(),
                   [](const Planned& a, const Planned& b) { return a.start_bin < b.start_bin; });

  // Greedy placement: a job starts at its drawn bin or, if too few nodes are
  // free then, at the first later bin where enough are.
  std::vector<std::int64_t> free_at(spec.node_count, 0);
  std::vector<std::int64_t> sorted;
  std::vector<std::size_t> free_nodes;
  for (auto& p : planned) {
    sorted = free_at;
    std::nth_element(sorted.begin(), sorted.begin() + (p.nodes - 1), sorted.end());
    const std::int64_t start = std::max(p.start_bin, sorted[p.nodes - 1]);
    if (start + static_cast<std::int64_t>(p.runtime_bins) > total_bins)
      throw std::invalid_argument(
          "scenario has more concurrent jobs than nodes: cannot place all jobs "
          "within the duration");
    p.start_bin = start;
    free_nodes.clear();
    for (std::size_t n = 0; n < spec.node_count; ++n)
      if (free_at[n] <= start) free_nodes.push_back(n);
    for (std::size_t i = 0; i < p.nodes; ++i) {
      std::size_t j = i + rng.uniform(0, free_nodes.size() - 1 - i);
      std::swap(free_nodes[i], free_nodes[j]);
    }
    p.node_ids.assign(free_nodes.begin(), free_nodes.begin() + p.nodes);
    std::sort(p.node_ids.begin(), p.node_ids.end());
    for (std::size_t n : p.node_ids)
      free_at[n] = start + static_cast<std::int64_t>(p.runtime_bins);
  }
  std::stable_sort(planned.begin(), planned.end(), [](const Planned& a, const Planned& b) {
    return std::tie(a.start_bin, a.order) < std::tie(b.start_bin, b.order);
  });
  return planned;
}

double contention(const ScenarioSpec& spec, const std::string& fs, Timestamp offset) {
  double m = 1.0;
  for (const auto& e : spec.episodes)
    if ((e.fs_id.empty() || e.fs_id == fs) && offset >= e.start_offset &&
        offset < e.end_offset)
      m *= e.multiplier;
  return m;
}

json counters_json(const Counters& c) { return json(std::vector<Count>(c.begin(), c.end())); }

Counters counters_from(const json& j) {
  Counters c{};
  if (!j.is_array() || j.size() != kOpCount)
    throw std::invalid_argument("ledger: counter array must have 21 entries");
  for (std::size_t i = 0; i < kOpCount; ++i) c[i] = j[i].get<Count>();
  return c;
}

}  // namespace

std::string_view pattern_name(IoPattern p) {
  switch (p) {
    case IoPattern::StreamingWrite: return "streaming-write";
    case IoPattern::SmallRead: return "small-read";
    case IoPattern::MetadataStorm: return "metadata-storm";
    case IoPattern::TaskFarm: return "task-farm";
    case IoPattern::Idle: return "idle";
  }
  return "idle";
}

IoPattern parse_pattern(std::string_view name) {
  for (IoPattern p : {IoPattern::StreamingWrite, IoPattern::SmallRead,
                      IoPattern::MetadataStorm, IoPattern::TaskFarm, IoPattern::Idle})
    if (pattern_name(p) == name) return p;
  throw std::invalid_argument("unknown I/O pattern '" + std::string(name) + "'");
}

void ScenarioSpec::validate() const {
  if (bin_width <= 0) throw std::invalid_argument("bin_width must be positive");
  if (start_ts <= 0 || start_ts % bin_width != 0)
    throw std::invalid_argument("start_ts must be positive and bin aligned");
  if (duration <= 0 || duration % bin_width != 0)
    throw std::invalid_argument("duration must be a positive multiple of bin_width");
  if (node_count == 0) throw std::invalid_argument("node_count must be positive");
  if (filesystems.empty()) throw std::invalid_argument("at least one filesystem required");
  if (probe_interval <= 0) throw std::invalid_argument("probe_interval must be positive");
  for (const auto& t : templates) {
    if (t.count == 0) throw std::invalid_argument("template '" + t.name + "' has zero count");
    if (t.min_nodes == 0 || t.min_nodes > t.max_nodes)
      throw std::invalid_argument("template '" + t.name + "' has bad node range");
    if (t.max_nodes > node_count)
      throw std::invalid_argument("template '" + t.name +
                                  "' needs more nodes than the scenario has");
    if (t.min_runtime_bins == 0 || t.min_runtime_bins > t.max_runtime_bins)
      throw std::invalid_argument("template '" + t.name + "' has bad runtime range");
    if (t.outlier_fraction < 0.0 || t.outlier_fraction > 1.0 || t.outlier_factor <= 0.0)
      throw std::invalid_argument("template '" + t.name + "' has bad outlier settings");
    if (t.intensity < 0.0 || t.cores_per_node <= 0)
      throw std::invalid_argument("template '" + t.name + "' has bad intensity/cores");
    for (const auto& fs : t.filesystems)
      if (std::find(filesystems.begin(), filesystems.end(), fs) == filesystems.end())
        throw std::invalid_argument("template '" + t.name + "' uses unknown fs '" + fs + "'");
  }
  for (const auto& j : jobs)
    if (j.nodes == 0 || j.runtime_bins == 0)
      throw std::invalid_argument("explicit job needs nodes and runtime");
  if (templates.empty() && !jobs.empty())
    throw std::invalid_argument("explicit jobs need templates");
}

GroundTruthLedger generate(const ScenarioSpec& spec, std::ostream& counters_out,
                           std::ostream& jobs_out, std::ostream* probes_out) {
  spec.validate();
  const Timestamp width = spec.bin_width;
  const std::int64_t total_bins = spec.duration / width;
  const std::size_t n_fs = spec.filesystems.size();
  auto planned = plan_jobs(spec);

  GroundTruthLedger ledger;
  ledger.seed = spec.seed;
  ledger.bin_width = width;

  // owner[node][bin] = planned job index or -1.
  std::vector<std::vector<std::int32_t>> owner(
      spec.node_count, std::vector<std::int32_t>(total_bins, -1));
  std::vector<std::vector<bool>> touches(planned.size(), std::vector<bool>(n_fs, false));
  for (std::size_t j = 0; j < planned.size(); ++j) {
    const auto& p = planned[j];
    const auto& tmpl = spec.templates[p.tmpl];
    for (std::size_t n : p.node_ids)
      for (std::int64_t b = p.start_bin; b < p.start_bin + static_cast<std::int64_t>(p.runtime_bins); ++b)
        owner[n][b] = static_cast<std::int32_t>(j);
    if (tmpl.filesystems.empty()) {
      touches[j][0] = true;
    } else {
      for (std::size_t f = 0; f < n_fs; ++f)
        touches[j][f] = std::find(tmpl.filesystems.begin(), tmpl.filesystems.end(),
                                  spec.filesystems[f]) != tmpl.filesystems.end();
    }

    LedgerJob lj;
    lj.record.job_id = job_name(j + 1);
    lj.record.project = tmpl.project;
    lj.record.command = command_for(tmpl);
    for (std::size_t n : p.node_ids) lj.record.nodes.push_back(node_name(n));
    lj.record.start_ts = spec.start_ts + p.start_bin * width;
    lj.record.end_ts = lj.record.start_ts + static_cast<Timestamp>(p.runtime_bins) * width;
    lj.record.cores_per_node = tmpl.cores_per_node;
    lj.pattern = std::string(pattern_name(tmpl.pattern));
    lj.intended_slowdown = p.outlier;
    for (const auto& fs : spec.filesystems) lj.fs_totals[fs] = Counters{};
    ledger.jobs.push_back(std::move(lj));
    ++ledger.jobs_per_project[tmpl.project];
  }

  // Scripted resets land on idle node-bins; the node does nothing in that bin
  // and restarts its counters from zero.
  std::vector<std::vector<bool>> reset_bin(spec.node_count,
                                           std::vector<bool>(total_bins, false));
  {
    Rng rng(spec.seed ^ 0x5eed5eedULL);
    std::size_t placed = 0;
    for (std::size_t attempt = 0; placed < spec.resets && attempt < 100 * (spec.resets + 1);
         ++attempt) {
      if (total_bins < 2) break;
      const std::size_t n = rng.uniform(0, spec.node_count - 1);
      const auto b = static_cast<std::int64_t>(rng.uniform(1, total_bins - 1));
      if (owner[n][b] >= 0 || reset_bin[n][b]) continue;
      reset_bin[n][b] = true;
      ++placed;
    }
    if (placed < spec.resets)
      throw std::invalid_argument("could not place all counter resets on idle bins");
  }

  std::vector<std::vector<Counters>> cumulative(spec.node_count, std::vector<Counters>(n_fs));
  for (std::size_t n = 0; n < spec.node_count; ++n)
    for (std::size_t f = 0; f < n_fs; ++f) {
      KeyedDraw d(spec.seed, {0xba5eULL, n, f});
      for (auto& v : cumulative[n][f]) v = d.uniform(1'000'000, 1'000'000'000);
    }
  for (const auto& fs : spec.filesystems) {
    ledger.fs_totals[fs] = Counters{};
    ledger.unattributed_totals[fs] = Counters{};
  }

  // Per-job multipliers drawn once per run.
  std::vector<double> job_scale(planned.size(), 1.0);
  for (std::size_t j = 0; j < planned.size(); ++j) {
    KeyedDraw d(spec.seed, {0x10b5ca1eULL, j});
    job_scale[j] = spec.templates[planned[j].tmpl].intensity * (0.8 + 0.4 * d.unit());
  }

  std::vector<std::string> node_names(spec.node_count);
  for (std::size_t n = 0; n < spec.node_count; ++n) node_names[n] = node_name(n);

  counters_out << kCounterHeader << '\n';
  std::string line;
  for (std::int64_t k = 0; k <= total_bins; ++k) {
    const Timestamp ts = spec.start_ts + k * width;
    for (std::size_t n = 0; n < spec.node_count; ++n) {
      for (std::size_t f = 0; f < n_fs; ++f) {
        const std::string& fs = spec.filesystems[f];
        Counters& cum = cumulative[n][f];
        if (k > 0) {
          const std::int64_t b = k - 1;
          const Timestamp bin_start = spec.start_ts + b * width;
          Counters delta{};
          const std::int32_t j = owner[n][b];
          if (reset_bin[n][b]) {
            cum = Counters{};
            if (f == 0) ledger.resets.push_back({node_names[n], ts});
          } else if (j >= 0) {
            if (touches[j][f]) {
              const auto& tmpl = spec.templates[planned[j].tmpl];
              KeyedDraw d(spec.seed, {static_cast<std::uint64_t>(j), n, f,
                                      static_cast<std::uint64_t>(b)});
              const double factor =
                  job_scale[j] * contention(spec, fs, bin_start - spec.start_ts);
              delta = pattern_delta(tmpl.pattern, factor, d);
              ledger.jobs[j].fs_totals[fs] += delta;
              ledger.jobs[j].totals += delta;
            }
          } else if (spec.background_noise) {
            KeyedDraw d(spec.seed, {0x4015eULL, n, f, static_cast<std::uint64_t>(b)});
            set(delta, OpKind::Statfs, 1);
            set(delta, OpKind::Getattr, d.uniform(0, 2));
            ledger.unattributed_totals[fs] += delta;
          }
          cum += delta;
          ledger.fs_bin_totals[fs][bin_start] += delta;
          ledger.fs_totals[fs] += delta;
        }
        line = std::to_string(ts);
        line.push_back(',');
        line.append(node_names[n]);
        line.push_back(',');
        line.append(csv::quote(fs));
        append_counters(line, cum);
        line.push_back('\n');
        counters_out << line;
        ++ledger.sample_rows;
      }
    }
  }

  std::vector<JobRecord> records;
  for (auto& lj : ledger.jobs) {
    records.push_back(lj.record);
    lj.size_bin = size_bin_label(size_row(lj.record.nodes.size()));
    constexpr double kKibPerGib = 1024.0 * 1024.0;
    lj.read_gib_bin = measure_bin_label(
        measure_exponent(static_cast<double>(lj.totals[index(OpKind::ReadKb)]) / kKibPerGib));
    lj.write_gib_bin = measure_bin_label(
        measure_exponent(static_cast<double>(lj.totals[index(OpKind::WriteKb)]) / kKibPerGib));
  }
  write_job_feed(jobs_out, records);

  if (probes_out) {
    std::vector<ProbeSample> probes;
    for (const auto& fs : spec.filesystems) {
      const auto& bins = ledger.fs_bin_totals[fs];
      double mean_data = 0.0, mean_md = 0.0;
      for (const auto& [b, c] : bins) {
        mean_data += static_cast<double>(c[index(OpKind::ReadKb)] + c[index(OpKind::WriteKb)]);
        mean_md += static_cast<double>(mds_total(c));
      }
      const double nb = std::max<double>(1.0, static_cast<double>(bins.size()));
      mean_data = std::max(1.0, mean_data / nb);
      mean_md = std::max(1.0, mean_md / nb);
      for (Timestamp t = spec.start_ts; t < spec.start_ts + spec.duration;
           t += spec.probe_interval) {
        const Timestamp b = bin_floor(t - spec.start_ts, width) + spec.start_ts;
        const Counters& c = bins.at(b);
        // Response time grows slowly with load and steeply once load passes
        // twice the mean rate, where the servers start queueing.
        const double data_load =
            static_cast<double>(c[index(OpKind::ReadKb)] + c[index(OpKind::WriteKb)]) /
            mean_data;
        const double md_load = static_cast<double>(mds_total(c)) / mean_md;
        const double excess =
            std::max(0.0, data_load - 2.0) + std::max(0.0, md_load - 2.0);
        KeyedDraw d(spec.seed, {0x9f0beULL, static_cast<std::uint64_t>(t)});
        const double noise = 0.95 + 0.1 * d.unit();
        const double latency =
            std::round((1.0 + 0.25 * (data_load + md_load) + 4.0 * excess) * noise * 1000.0) /
            1000.0;
        probes.push_back({t, fs, latency});
      }
    }
    write_probe_feed(*probes_out, probes);
  }
  return ledger;
}

std::string ledger_to_json(const GroundTruthLedger& ledger) {
  json j;
  j["seed"] = ledger.seed;
  j["bin_width"] = ledger.bin_width;
  j["sample_rows"] = ledger.sample_rows;
  json names = json::array();
  for (OpKind op : kAllOps) names.push_back(std::string(op_name(op)));
  j["counters"] = names;
  json jobs = json::array();
  for (const auto& lj : ledger.jobs) {
    json e;
    e["job_id"] = lj.record.job_id;
    e["project"] = lj.record.project;
    e["command"] = lj.record.command;
    e["nodes"] = lj.record.nodes;
    e["start_ts"] = lj.record.start_ts;
    e["end_ts"] = lj.record.end_ts;
    e["cores_per_node"] = lj.record.cores_per_node;
    e["pattern"] = lj.pattern;
    e["intended_slowdown"] = lj.intended_slowdown;
    e["intended_cell"] = {{"size", lj.size_bin},
                          {"read_gib", lj.read_gib_bin},
                          {"write_gib", lj.write_gib_bin}};
    e["totals"] = counters_json(lj.totals);
    json per_fs = json::object();
    for (const auto& [fs, c] : lj.fs_totals) per_fs[fs] = counters_json(c);
    e["fs_totals"] = per_fs;
    jobs.push_back(std::move(e));
  }
  j["jobs"] = std::move(jobs);
  json fs_totals = json::object(), unattributed = json::object(), bins = json::object();
  for (const auto& [fs, c] : ledger.fs_totals) fs_totals[fs] = counters_json(c);
  for (const auto& [fs, c] : ledger.unattributed_totals) unattributed[fs] = counters_json(c);
  for (const auto& [fs, per_bin] : ledger.fs_bin_totals) {
    json rows = json::array();
    for (const auto& [b, c] : per_bin) {
      json row = json::array({b});
      for (Count v : c) row.push_back(v);
      rows.push_back(std::move(row));
    }
    bins[fs] = std::move(rows);
  }
  j["fs_totals"] = std::move(fs_totals);
  j["unattributed_totals"] = std::move(unattributed);
  j["fs_bin_totals"] = std::move(bins);
  json resets = json::array();
  for (const auto& r : ledger.resets) resets.push_back({{"node", r.node_id}, {"ts", r.ts}});
  j["resets"] = std::move(resets);
  j["jobs_per_project"] = ledger.jobs_per_project;
  return j.dump(1) + "\n";
}

GroundTruthLedger ledger_from_json(const std::string& text) {
  const json j = json::parse(text);
  GroundTruthLedger ledger;
  ledger.seed = j.at("seed").get<std::uint64_t>();
  ledger.bin_width = j.at("bin_width").get<Timestamp>();
  ledger.sample_rows = j.at("sample_rows").get<std::size_t>();
  for (const auto& e : j.at("jobs")) {
    LedgerJob lj;
    lj.record.job_id = e.at("job_id").get<std::string>();
    lj.record.project = e.at("project").get<std::string>();
    lj.record.command = e.at("command").get<std::string>();
    lj.record.nodes = e.at("nodes").get<std::vector<std::string>>();
    lj.record.start_ts = e.at("start_ts").get<Timestamp>();
    lj.record.end_ts = e.at("end_ts").get<Timestamp>();
    lj.record.cores_per_node = e.at("cores_per_node").get<int>();
    lj.pattern = e.at("pattern").get<std::string>();
    lj.intended_slowdown = e.at("intended_slowdown").get<bool>();
    lj.size_bin = e.at("intended_cell").at("size").get<std::string>();
    lj.read_gib_bin = e.at("intended_cell").at("read_gib").get<std::string>();
    lj.write_gib_bin = e.at("intended_cell").at("write_gib").get<std::string>();
    lj.totals = counters_from(e.at("totals"));
    for (const auto& [fs, c] : e.at("fs_totals").items()) lj.fs_totals[fs] = counters_from(c);
    ledger.jobs.push_back(std::move(lj));
  }
  for (const auto& [fs, c] : j.at("fs_totals").items()) ledger.fs_totals[fs] = counters_from(c);
  for (const auto& [fs, c] : j.at("unattributed_totals").items())
    ledger.unattributed_totals[fs] = counters_from(c);
  for (const auto& [fs, rows] : j.at("fs_bin_totals").items())
    for (const auto& row : rows) {
      Counters c{};
      for (std::size_t i = 0; i < kOpCount; ++i) c[i] = row.at(i + 1).get<Count>();
      ledger.fs_bin_totals[fs][row.at(0).get<Timestamp>()] = c;
    }
  for (const auto& r : j.at("resets"))
    ledger.resets.push_back({r.at("node").get<std::string>(), r.at("ts").get<Timestamp>()});
  ledger.jobs_per_project =
      j.at("jobs_per_project").get<std::map<std::string, std::size_t>>();
  return ledger;
}

ScenarioSpec scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  ScenarioSpec s;
  s.seed = j.value("seed", s.seed);
  s.start_ts = j.value("start_ts", s.start_ts);
  s.duration = j.value("duration", s.duration);
  s.bin_width = j.value("bin_width", s.bin_width);
  s.node_count = j.value("node_count", s.node_count);
  s.filesystems = j.value("filesystems", s.filesystems);
  s.resets = j.value("resets", s.resets);
  s.background_noise = j.value("background_noise", s.background_noise);
  s.probe_interval = j.value("probe_interval", s.probe_interval);
  for (const auto& t : j.value("templates", json::array())) {
    JobTemplate jt;
    jt.name = t.at("name").get<std::string>();
    jt.pattern = parse_pattern(t.at("pattern").get<std::string>());
    jt.count = t.value("count", jt.count);
    jt.project = t.value("project", jt.project);
    jt.command = t.value("command", jt.command);
    jt.min_nodes = t.value("min_nodes", jt.min_nodes);
    jt.max_nodes = t.value("max_nodes", jt.max_nodes);
    jt.min_runtime_bins = t.value("min_runtime_bins", jt.min_runtime_bins);
    jt.max_runtime_bins = t.value("max_runtime_bins", jt.max_runtime_bins);
    jt.outlier_fraction = t.value("outlier_fraction", jt.outlier_fraction);
    jt.outlier_factor = t.value("outlier_factor", jt.outlier_factor);
    jt.filesystems = t.value("filesystems", jt.filesystems);
    jt.intensity = t.value("intensity", jt.intensity);
    jt.cores_per_node = t.value("cores_per_node", jt.cores_per_node);
    s.templates.push_back(std::move(jt));
  }
  for (const auto& e : j.value("jobs", json::array())) {
    ExplicitJob ej;
    ej.template_index = e.at("template").get<std::size_t>();
    ej.nodes = e.value("nodes", ej.nodes);
    ej.start_offset = e.value("start_offset", ej.start_offset);
    ej.runtime_bins = e.value("runtime_bins", ej.runtime_bins);
    ej.scripted_outlier = e.value("scripted_outlier", ej.scripted_outlier);
    s.jobs.push_back(ej);
  }
  for (const auto& e : j.value("episodes", json::array())) {
    ContentionEpisode ce;
    ce.start_offset = e.at("start_offset").get<Timestamp>();
    ce.end_offset = e.at("end_offset").get<Timestamp>();
    ce.multiplier = e.at("multiplier").get<double>();
    ce.fs_id = e.value("fs", std::string());
    s.episodes.push_back(ce);
  }
  s.validate();
  return s;
}

std::string scenario_to_json(const ScenarioSpec& s) {
  json j;
  j["seed"] = s.seed;
  j["start_ts"] = s.start_ts;
  j["duration"] = s.duration;
  j["bin_width"] = s.bin_width;
  j["node_count"] = s.node_count;
  j["filesystems"] = s.filesystems;
  j["resets"] = s.resets;
  j["background_noise"] = s.background_noise;
  j["probe_interval"] = s.probe_interval;
  json templates = json::array();
  for (const auto& t : s.templates)
    templates.push_back({{"name", t.name},
                         {"pattern", std::string(pattern_name(t.pattern))},
                         {"count", t.count},
                         {"project", t.project},
                         {"command", t.command},
                         {"min_nodes", t.min_nodes},
                         {"max_nodes", t.max_nodes},
                         {"min_runtime_bins", t.min_runtime_bins},
                         {"max_runtime_bins", t.max_runtime_bins},
                         {"outlier_fraction", t.outlier_fraction},
                         {"outlier_factor", t.outlier_factor},
                         {"filesystems", t.filesystems},
                         {"intensity", t.intensity},
                         {"cores_per_node", t.cores_per_node}});
  j["templates"] = std::move(templates);
  json jobs = json::array();
  for (const auto& e : s.jobs)
    jobs.push_back({{"template", e.template_index},
                    {"nodes", e.nodes},
                    {"start_offset", e.start_offset},
                    {"runtime_bins", e.runtime_bins},
                    {"scripted_outlier", e.scripted_outlier}});
  j["jobs"] = std::move(jobs);
  json episodes = json::array();
  for (const auto& e : s.episodes)
    episodes.push_back({{"start_offset", e.start_offset},
                        {"end_offset", e.end_offset},
                        {"multiplier", e.multiplier},
                        {"fs", e.fs_id}});
  j["episodes"] = std::move(episodes);
  return j.dump(1) + "\n";
}

ScenarioSpec preset(std::string_view name, std::uint64_t seed) {
  ScenarioSpec s;
  s.seed = seed;
  auto tmpl = [](std::string n, IoPattern p, std::size_t count, std::string project,
                 std::size_t nmin, std::size_t nmax, std::size_t rmin, std::size_t rmax) {
    JobTemplate t;
    t.name = std::move(n);
    t.pattern = p;
    t.count = count;
    t.project = std::move(project);
    t.min_nodes = nmin;
    t.max_nodes = nmax;
    t.min_runtime_bins = rmin;
    t.max_runtime_bins = rmax;
    return t;
  };

  if (name == "demo") {
    s.duration = 2 * 86'400;
    s.node_count = 64;
    s.filesystems = {"fs1", "fs2"};
    s.resets = 3;
    s.templates = {
        tmpl("climate", IoPattern::StreamingWrite, 12, "climate", 8, 32, 10, 30),
        tmpl("genomics", IoPattern::SmallRead, 10, "bio", 1, 4, 5, 20),
        tmpl("mdtest", IoPattern::MetadataStorm, 4, "benchmark", 1, 2, 2, 6),
        tmpl("farm", IoPattern::TaskFarm, 60, "materials", 1, 1, 1, 3),
        tmpl("cfd", IoPattern::Idle, 6, "engineering", 16, 32, 20, 40),
    };
    s.templates[0].filesystems = {"fs1", "fs2"};
    s.templates[1].filesystems = {"fs2"};
    s.templates[3].command = "./farm_task.sh";
    s.episodes = {{10 * 3600, 12 * 3600, 6.0, "fs1"}};
  } else if (name == "scale") {
    s.duration = 7 * 86'400;
    s.node_count = 200;
    s.filesystems = {"fs1", "fs2"};
    s.resets = 10;
    s.templates = {
        tmpl("climate", IoPattern::StreamingWrite, 150, "climate", 8, 64, 10, 40),
        tmpl("genomics", IoPattern::SmallRead, 200, "bio", 1, 8, 5, 20),
        tmpl("mdtest", IoPattern::MetadataStorm, 50, "benchmark", 1, 4, 2, 8),
        tmpl("farm", IoPattern::TaskFarm, 500, "materials", 1, 2, 1, 4),
        tmpl("cfd", IoPattern::Idle, 100, "engineering", 4, 32, 5, 30),
    };
    s.templates[0].filesystems = {"fs1", "fs2"};
    s.templates[1].filesystems = {"fs2"};
    s.templates[3].command = "./farm_task.sh";
    s.episodes = {{2 * 86'400, 2 * 86'400 + 3 * 3600, 5.0, "fs1"}};
  } else if (name == "contention") {
    // Fixed layout so that a large writer is running through both episodes;
    // the seed only changes the per-bin I/O draws.
    s.duration = 86'400;
    s.node_count = 48;
    s.filesystems = {"fs1"};
    s.templates = {
        tmpl("climate", IoPattern::StreamingWrite, 1, "climate", 16, 16, 1, 1),
        tmpl("genomics", IoPattern::SmallRead, 1, "bio", 2, 2, 1, 1),
        tmpl("farm", IoPattern::TaskFarm, 1, "materials", 1, 1, 1, 1),
    };
    s.templates[1].intensity = 0.25;
    s.templates[2].command = "./farm_task.sh";
    const Timestamp w = s.bin_width;
    for (auto [start, bins] : {std::pair{0, 40}, {50, 40}, {100, 35}, {140, 40}, {190, 40}})
      s.jobs.push_back({0, 16, start * w, static_cast<std::size_t>(bins), false});
    for (int i = 0; i < 8; ++i) s.jobs.push_back({1, 2, i * 30 * w, 30, false});
    for (int i = 0; i < 30; ++i) s.jobs.push_back({2, 1, i * 8 * w, 2, false});
    s.episodes = {{60 * w, 80 * w, 8.0, ""}, {160 * w, 170 * w, 6.0, ""}};
  } else if (name == "slowdown") {
    s.duration = 3 * 86'400;
    s.node_count = 64;
    s.filesystems = {"fs1"};
    s.templates = {
        tmpl("wrf", IoPattern::StreamingWrite, 16, "climate", 4, 8, 18, 22),
        tmpl("gromacs", IoPattern::SmallRead, 16, "bio", 2, 4, 9, 11),
        tmpl("vasp", IoPattern::Idle, 8, "materials", 1, 2, 28, 32),
        tmpl("lammps", IoPattern::TaskFarm, 10, "materials", 1, 1, 4, 4),
    };
    s.templates[0].outlier_fraction = 0.125;
    s.templates[1].outlier_fraction = 0.125;
    s.templates[2].outlier_fraction = 0.125;
  } else if (name == "idle") {
    s.duration = 6 * 3600;
    s.node_count = 4;
    s.background_noise = false;
    s.templates = {tmpl("sleep", IoPattern::Idle, 1, "general", 2, 2, 4, 4)};
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  s.validate();
  return s;
}

}  // namespace iorisk::simgen
