// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "iorisk/analytics.hpp"
#include "iorisk/config.hpp"
#include "iorisk/pipeline.hpp"
#include "iorisk/report.hpp"
#include "iorisk/simgen.hpp"
#include "oracle/brute_force.hpp"
#include "support.hpp"

using namespace iorisk;
namespace sg = iorisk::simgen;
using Clock = std::chrono::steady_clock;

namespace {

// Collects failure notes for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::string detail;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string str(double v) {
  std::ostringstream o;
  o.precision(12);
  o << v;
  return o.str();
}

struct Simulated {
  std::vector<JobRecord> jobs;
  std::vector<CounterSample> samples;
  std::vector<ProbeSample> probes;
  sg::GroundTruthLedger ledger;
};

Simulated simulate(const sg::ScenarioSpec& spec) {
  std::ostringstream c, j, p;
  Simulated s;
  s.ledger = sg::generate(spec, c, j, &p);
  std::istringstream ci(c.str()), ji(j.str()), pi(p.str());
  s.samples = parse_counter_feed(ci);
  s.jobs = parse_job_feed(ji);
  s.probes = parse_probe_feed(pi);
  return s;
}

void write_feeds(const sg::ScenarioSpec& spec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream c(dir / "counters.csv", std::ios::binary), j(dir / "jobs.csv", std::ios::binary),
      p(dir / "probe.csv", std::ios::binary);
  sg::generate(spec, c, j, &p);
}

Config config_for(const std::filesystem::path& data, const std::filesystem::path& out) {
  Config c;
  c.counters = data / "counters.csv";
  c.jobs = data / "jobs.csv";
  c.probe = data / "probe.csv";
  c.out = out;
  return c;
}

// 1
void metric_oracle(Check& c) {
  const auto t0 = Clock::now();
  std::size_t points = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed * 7919);
    auto f = support::random_fixture(rng, 50, 24, 100, {"fs1", "fs2"});
    auto a = attribute_usage(f.node_usage, f.jobs, f.bin_width);
    auto totals = sum_by_fs_bin(f.node_usage);
    auto m = compute_metrics(a.job_usage, totals);
    auto base = oracle::baselines(totals, f.bin_width);
    std::map<std::tuple<std::string, std::string, Timestamp>, const Counters*> by_key;
    for (const auto& u : a.job_usage) by_key[{u.job_id, u.fs_id, u.bin_start}] = &u.deltas;
    c.expect(m.job_points.size() == a.job_usage.size(), "one point per job-bin");
    for (const auto& p : m.job_points) {
      const Counters& x = *by_key.at({p.risk.subject, p.risk.fs_id, p.risk.bin_start});
      auto r = oracle::risk(x, base.at(p.risk.fs_id), 2, 0.25, 1.0);
      const auto tag = "seed " + std::to_string(seed) + " " + p.risk.subject;
      c.expect(std::abs(p.risk.risk_oss - static_cast<double>(r.oss)) < 1e-9, tag + " risk_oss");
      c.expect(std::abs(p.risk.risk_mds - static_cast<double>(r.mds)) < 1e-9, tag + " risk_mds");
      c.expect(std::abs(p.quality.read_kb_ops - static_cast<double>(oracle::quality(x[1], x[0]))) < 1e-9,
               tag + " read quality");
      c.expect(std::abs(p.quality.write_kb_ops - static_cast<double>(oracle::quality(x[3], x[2]))) < 1e-9,
               tag + " write quality");
      ++points;
    }
  }
  const double dt = seconds_since(t0);
  c.expect(dt < 10.0, "runtime " + str(dt) + " s");
  c.detail = std::to_string(points) + " job-bins over 10 fixtures in " + str(dt) + " s";
}

// 2
void shipped_defaults(Check& c) {
  Config cfg;
  c.expect(cfg.alpha == 2.0, "alpha");
  c.expect(cfg.beta == 0.25, "beta");
  c.expect(cfg.slowdown_factor == 1.5, "slowdown factor");
  c.expect(cfg.scatter_min_risk == 25.0, "scatter threshold");
  c.expect(cfg.bin_width_s == 360, "bin width");
  c.expect(RiskParams{}.alpha == 2.0 && RiskParams{}.beta == 0.25, "risk params");
  c.expect(kBreakdownEdgesGib == std::array<double, 4>{4, 32, 256, 2048}, "breakdown edges");
  c.expect(kBreakdownLabels[0] == "(0,4)" && kBreakdownLabels[4] == "[2048,)", "breakdown labels");
  c.detail = "alpha=2 beta=0.25 factor=1.5 threshold=25 edges 4/32/256/2048";
}

// 3
void clamp_and_decomposition(Check& c) {
  FsBaseline b;
  b.fs_id = "fs1";
  b.avg.fill(50);
  b.avg[index(OpKind::Mkdir)] = 0.1;
  b.md_total_avg = 100;
  JobBinUsage u;
  u.job_id = "storm";
  u.fs_id = "fs1";
  u.deltas[index(OpKind::Mkdir)] = 500;
  const auto storm = job_bin_risk(u, b, RiskParams{});
  c.expect(storm.per_op_risk[index(OpKind::Mkdir)] == 19.0,
           "mkdir beta path gave " + str(storm.per_op_risk[index(OpKind::Mkdir)]));

  std::size_t fs_points = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    auto f = support::random_fixture(rng, 50, 16, 80, {"fs1", "fs2"});
    auto a = attribute_usage(f.node_usage, f.jobs, f.bin_width);
    auto m = compute_metrics(a.job_usage, sum_by_fs_bin(f.node_usage));
    std::map<std::pair<std::string, Timestamp>, std::pair<long double, long double>> sum;
    bool beta_seen = false;
    for (const auto& p : m.job_points) {
      for (double v : p.risk.per_op_risk) c.expect(v >= 0.0, "negative contribution");
      c.expect(p.risk.risk_oss >= 0 && p.risk.risk_mds >= 0, "negative risk");
      auto& s = sum[{p.risk.fs_id, p.risk.bin_start}];
      s.first += p.risk.risk_oss;
      s.second += p.risk.risk_mds;
      beta_seen |= p.risk.per_op_risk[index(OpKind::Mkdir)] > 0;
    }
    c.expect(beta_seen, "fixture exercises the beta path");
    for (const auto& p : m.fs_points) {
      auto s = sum[{p.risk.fs_id, p.risk.bin_start}];
      c.expect(std::abs(p.risk.risk_oss - static_cast<double>(s.first)) < 1e-9, "fs risk_oss decomposition");
      c.expect(std::abs(p.risk.risk_mds - static_cast<double>(s.second)) < 1e-9, "fs risk_mds decomposition");
      ++fs_points;
    }
  }
  c.detail = "mkdir storm = " + str(storm.per_op_risk[index(OpKind::Mkdir)]) + "; " +
             std::to_string(fs_points) + " fs-bins decompose";
}

// 4
void quality_identity(Check& c) {
  auto run = [&](Count kb_per_op) {
    std::vector<CounterSample> s;
    for (int i = 0; i <= 4; ++i) {
      CounterSample x;
      x.timestamp = support::kT0 + i * 360;
      x.node_id = "n1";
      x.fs_id = "fs1";
      x.values[index(OpKind::WriteOps)] = 100 * i;
      x.values[index(OpKind::WriteKb)] = 100 * i * kb_per_op;
      s.push_back(x);
    }
    JobRecord j;
    j.job_id = "w";
    j.command = "./w";
    j.nodes = {"n1"};
    j.start_ts = support::kT0;
    j.end_ts = support::kT0 + 4 * 360;
    auto a = attribute_usage(deltify_and_bin(s), {j});
    std::set<double> q;
    for (const auto& u : a.job_usage) q.insert(job_bin_quality(u).write_kb_ops);
    return q;
  };
  auto mib = run(1024), kib = run(1);
  c.expect(mib == std::set<double>{1.0}, "1 MiB per op");
  c.expect(kib == std::set<double>{1024.0}, "1 KiB per op");
  c.detail = "1 MiB/op -> " + (mib.size() == 1 ? str(*mib.begin()) : "?") + ", 1 KiB/op -> " +
             (kib.size() == 1 ? str(*kib.begin()) : "?");
}

// 5
void conservation_chain(Check& c) {
  std::size_t jobs_checked = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    auto sim = simulate(sg::preset("demo", seed));
    const auto& L = sim.ledger;
    auto binned = deltify_and_bin(sim.samples);

    std::map<std::string, Counters> ingest_fs;
    for (const auto& t : sum_by_fs_bin(binned)) {
      ingest_fs[t.fs_id] += t.deltas;
      const auto& bins = L.fs_bin_totals.at(t.fs_id);
      auto it = bins.find(t.bin_start);
      c.expect(it == bins.end() ? all_zero(t.deltas) : it->second == t.deltas, "ledger fs-bin totals");
    }
    for (const auto& [fs, tot] : L.fs_totals) c.expect(ingest_fs[fs] == tot, "ledger = ingest for " + fs);

    auto a = attribute_usage(binned, sim.jobs);
    std::map<std::string, Counters> attributed_fs, unattributed_fs;
    std::map<std::pair<std::string, std::string>, Counters> per_job_fs;
    for (const auto& u : a.job_usage) {
      attributed_fs[u.fs_id] += u.deltas;
      per_job_fs[{u.job_id, u.fs_id}] += u.deltas;
    }
    for (const auto& u : a.unattributed) unattributed_fs[u.fs_id] += u.deltas;
    for (const auto& [fs, tot] : L.fs_totals) {
      Counters sum = attributed_fs[fs];
      sum += unattributed_fs[fs];
      c.expect(sum == tot, "attributed + unattributed = ingest for " + fs);
      c.expect(unattributed_fs[fs] == L.unattributed_totals.at(fs), "unattributed = ledger for " + fs);
    }

    auto summaries = summarize_jobs(sim.jobs, a.job_usage);
    std::map<std::string, const JobIoSummary*> by_id;
    for (const auto& s : summaries) by_id[s.job_id] = &s;
    for (const auto& lj : L.jobs) {
      const auto& id = lj.record.job_id;
      for (const auto& [fs, tot] : lj.fs_totals)
        c.expect(per_job_fs[{id, fs}] == tot, "per-job attribution " + id + " " + fs);
      const auto* s = by_id.at(id);
      c.expect(s->totals == lj.totals, "summary totals " + id);
      c.expect(s->read_kb_total == lj.totals[0] && s->write_ops_total == lj.totals[3],
               "summary columns " + id);
      ++jobs_checked;
    }
  }
  c.detail = std::to_string(jobs_checked) + " jobs over 3 seeds, all 21 counters, per fs";
}

// 6
void heatmap_mass(Check& c) {
  auto sim = simulate(sg::preset("demo", 5));
  auto a = attribute_usage(deltify_and_bin(sim.samples), sim.jobs);
  auto s = summarize_jobs(sim.jobs, a.job_usage);
  std::int64_t total = 0;
  for (const auto& x : s) total += x.core_seconds;
  for (HeatmapMeasure m : kAllMeasures) {
    auto h = build_heatmap(s, m);
    std::int64_t cells = 0;
    for (const auto& row : h.core_seconds)
      for (auto v : row) cells += v;
    c.expect(cells == total, std::string(measure_name(m)) + " mass");
    for (const auto& one : s) {
      auto h1 = build_heatmap({one}, m);
      int nonzero = 0;
      for (const auto& row : h1.core_seconds)
        for (auto v : row) nonzero += v != 0;
      c.expect(nonzero == 1, one.job_id + " lands in one cell");
      c.expect(h.core_seconds[size_row(one.nodes_count)][h.column_of(measure_value(one, m))] >=
                   one.core_seconds,
               one.job_id + " cell");
    }
  }
  for (const auto& lj : sim.ledger.jobs) {
    auto h = build_heatmap(s, HeatmapMeasure::WriteGib);
    auto it = std::find_if(s.begin(), s.end(), [&](auto& x) { return x.job_id == lj.record.job_id; });
    c.expect(h.row_label(size_row(it->nodes_count)) == lj.size_bin, "ledger size cell");
    c.expect(h.col_label(h.column_of(it->write_gib)) == lj.write_gib_bin, "ledger write cell");
  }
  auto t = build_breakdown(s);
  double r = 0, w = 0;
  for (int i = 0; i < 5; ++i) {
    r += t.read_pct[i];
    w += t.write_pct[i];
  }
  c.expect(std::abs(r - 100) <= 0.1 && std::abs(w - 100) <= 0.1, "breakdown columns");
  c.detail = std::to_string(s.size()) + " jobs, " + str(static_cast<double>(total) / 3600) +
             " core-h; breakdown sums " + str(r) + " / " + str(w);
}

// 7
void slowdown_detection(Check& c) {
  std::size_t scripted_total = 0, found_total = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto sim = simulate(sg::preset("slowdown", seed));
    std::set<std::string> scripted, found;
    for (const auto& lj : sim.ledger.jobs)
      if (lj.intended_slowdown) scripted.insert(lj.record.job_id);
    for (const auto& f : detect_slowdown(group_applications(sim.jobs), 1.5, 3)) found.insert(f.job_id);
    c.expect(!scripted.empty(), "seed " + std::to_string(seed) + " scripts outliers");
    c.expect(found == scripted, "seed " + std::to_string(seed) + ": " + std::to_string(found.size()) +
                                    " found vs " + std::to_string(scripted.size()) + " scripted");
    scripted_total += scripted.size();
    found_total += found.size();
  }
  c.detail = std::to_string(found_total) + " findings, " + std::to_string(scripted_total) +
             " scripted outliers over 5 seeds";
}

// 8
void correlation_sanity(Check& c) {
  TimeSeries a, neg;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 240; ++i) {
    const double v = static_cast<double>(rng() % 10'000);
    a.push_back({i * 360, v});
    neg.push_back({i * 360, -v});
  }
  const double self = *correlate_series(a, a, 0, 360).pearson;
  const double anti = *correlate_series(a, neg, 0, 360).pearson;
  c.expect(std::abs(self - 1.0) < 1e-12, "self " + str(self));
  c.expect(std::abs(anti + 1.0) < 1e-12, "negation " + str(anti));

  support::TempDir dir("acc-contention");
  write_feeds(sg::preset("contention", 1), dir.path / "data");
  run_all(config_for(dir.path / "data", dir.path / "out"));
  std::ifstream corr(dir.path / "out" / "correlation.csv");
  std::string header, line;
  std::getline(corr, header);
  std::getline(corr, line);
  const double got = std::stod(line.substr(line.rfind(',') + 1));

  std::ifstream risk_in(dir.path / "out" / "risk_timeseries.csv"), probe_in(dir.path / "data" / "probe.csv");
  std::vector<std::pair<Timestamp, double>> risk, probe;
  for (const auto& r : read_risk_timeseries(risk_in))
    if (r.subject == kFsSubject && r.fs_id == "fs1") risk.emplace_back(r.bin_start, r.risk_oss + r.risk_mds);
  for (const auto& p : parse_probe_feed(probe_in))
    if (p.fs_id == "fs1") probe.emplace_back(p.ts, p.latency_ms);
  const auto expect = oracle::binned_pearson(risk, probe, 360);
  c.expect(expect.has_value(), "oracle defined");
  c.expect(got > 0.8, "contention correlation " + str(got));
  if (expect) c.expect(std::abs(got - static_cast<double>(*expect)) < 1e-9, "brute-force Pearson");
  c.detail = "self " + str(self) + ", negation " + str(anti) + ", contention " + str(got) +
             " (brute force " + (expect ? str(static_cast<double>(*expect)) : "undefined") + ")";
}

// 9
void determinism_and_scale(Check& c) {
  support::TempDir dir("acc-scale");
  const std::string bin = IORISK_BIN;
  auto sh = [](const std::string& cmd) {
    const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  const auto data = dir.path / "data";
  auto t = Clock::now();
  c.expect(sh(bin + " simulate --preset scale --seed 1 --out " + data.string()) == 0, "simulate");
  const double sim_s = seconds_since(t);
  const std::string feeds = " --counters " + (data / "counters.csv").string() + " --jobs " +
                            (data / "jobs.csv").string() + " --probe " + (data / "probe.csv").string();
  double worst = 0;
  for (const char* run : {"run1", "run2"}) {
    t = Clock::now();
    c.expect(sh(bin + " all" + feeds + " --out " + (dir.path / run).string()) == 0, std::string(run));
    worst = std::max(worst, seconds_since(t));
  }
  c.expect(worst < 60.0, "all took " + str(worst) + " s");
  const auto a = support::tree(dir.path / "run1"), b = support::tree(dir.path / "run2");
  c.expect(!a.empty() && a == b, "outputs differ between runs");

  std::ifstream jobs(data / "jobs.csv");
  std::size_t job_rows = 0, node_bins = 0;
  for (std::string l; std::getline(jobs, l);) ++job_rows;
  std::ifstream usage(dir.path / "run1" / "store" / "node_usage.csv");
  for (std::string l; std::getline(usage, l);) ++node_bins;
  c.detail = std::to_string(job_rows - 1) + " jobs, " + std::to_string(node_bins - 1) +
             " node-bin records; simulate " + str(sim_s) + " s, all " + str(worst) + " s; " +
             std::to_string(a.size()) + " files identical";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria = {
      {"metric oracle equivalence", metric_oracle},
      {"shipped constant defaults", shipped_defaults},
      {"clamp and decomposition invariants", clamp_and_decomposition},
      {"quality identity", quality_identity},
      {"conservation chain", conservation_chain},
      {"heatmap mass conservation", heatmap_mass},
      {"slowdown detection", slowdown_detection},
      {"correlation sanity", correlation_sanity},
      {"determinism and scale", determinism_and_scale},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    failed += !ok;
    std::cout << "criterion " << i + 1 << ": " << (ok ? "PASS" : "FAIL") << "  "
              << criteria[i].first << " | " << c.detail << '\n';
    for (const auto& f : c.failures) std::cout << "    " << f << '\n';
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
