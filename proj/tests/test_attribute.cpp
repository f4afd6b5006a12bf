#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "doctest.h"
#include "iorisk/attribute.hpp"
#include "support.hpp"

using namespace iorisk;

namespace {

JobRecord job(std::string id, std::vector<std::string> nodes, Timestamp s, Timestamp e) {
  JobRecord j;
  j.job_id = std::move(id);
  j.project = "p";
  j.command = "./x";
  j.nodes = std::move(nodes);
  j.start_ts = s;
  j.end_ts = e;
  return j;
}

BinnedNodeUsage usage(std::string node, Timestamp bin, OpKind op, Count v,
                      std::string fs = "fs1") {
  BinnedNodeUsage u;
  u.node_id = std::move(node);
  u.fs_id = std::move(fs);
  u.bin_start = bin;
  u.deltas[index(op)] = v;
  return u;
}

}  // namespace

TEST_CASE("bin fully inside a job goes to that job") {
  auto r = attribute_usage({usage("n1", 3600, OpKind::ReadOps, 77)},
                           {job("j1", {"n1"}, 3000, 5000)});
  REQUIRE(r.job_usage.size() == 1);
  CHECK(r.job_usage[0].job_id == "j1");
  CHECK(r.job_usage[0].deltas[index(OpKind::ReadOps)] == 77);
  for (const auto& u : r.unattributed) CHECK(all_zero(u.deltas));
}

TEST_CASE("half-covered bin splits 101 into 50 unowned and 51 for the job") {
  // Job starts halfway through the bin: the unowned segment comes first.
  auto r = attribute_usage({usage("n1", 3600, OpKind::WriteOps, 101)},
                           {job("j1", {"n1"}, 3780, 9000)});
  REQUIRE(r.job_usage.size() == 1);
  REQUIRE(r.unattributed.size() == 1);
  CHECK(r.job_usage[0].deltas[index(OpKind::WriteOps)] == 51);
  CHECK(r.unattributed[0].deltas[index(OpKind::WriteOps)] == 50);
}

TEST_CASE("usage after end_ts is not attributed") {
  auto r = attribute_usage({usage("n1", 3600, OpKind::Open, 10), usage("n1", 3960, OpKind::Open, 5)},
                           {job("j1", {"n1"}, 3600, 3960)});
  REQUIRE(r.job_usage.size() == 1);
  CHECK(r.job_usage[0].bin_start == 3600);
  Count unowned = 0;
  for (const auto& u : r.unattributed) unowned += u.deltas[index(OpKind::Open)];
  CHECK(unowned == 5);
}

TEST_CASE("two short jobs in one bin share it by time") {
  auto r = attribute_usage({usage("n1", 3600, OpKind::ReadKb, 360)},
                           {job("a", {"n1"}, 3600, 3720), job("b", {"n1"}, 3720, 3960)});
  REQUIRE(r.job_usage.size() == 2);
  CHECK(r.job_usage[0].deltas[0] == 120);
  CHECK(r.job_usage[1].deltas[0] == 240);
}

TEST_CASE("overlapping allocation is a conflict naming both jobs") {
  std::vector<JobRecord> jobs = {job("a", {"n1", "n2"}, 0, 1000), job("b", {"n2"}, 900, 2000)};
  try {
    check_exclusive_allocation(jobs);
    FAIL("expected AttributionConflict");
  } catch (const AttributionConflict& e) {
    CHECK(e.node() == "n2");
    CHECK(((e.first_job() == "a" && e.second_job() == "b") ||
           (e.first_job() == "b" && e.second_job() == "a")));
    CHECK(std::string(e.what()).find("a") != std::string::npos);
  }
  CHECK_THROWS_AS(attribute_usage({}, jobs), AttributionConflict);
  CHECK_NOTHROW(check_exclusive_allocation({job("a", {"n1"}, 0, 1000), job("b", {"n1"}, 1000, 2000)}));
}

TEST_CASE("20-job 40-node randomized fixture conserves per fs, bin and counter") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    auto f = support::random_fixture(rng, 20, 40, 30, {"fs1", "fs2"});
    auto r = attribute_usage(f.node_usage, f.jobs, f.bin_width);

    using Key = std::tuple<std::string, Timestamp>;
    std::map<Key, Counters> input, output;
    for (const auto& u : f.node_usage) input[{u.fs_id, u.bin_start}] += u.deltas;
    for (const auto& u : r.job_usage) output[{u.fs_id, u.bin_start}] += u.deltas;
    for (const auto& u : r.unattributed) output[{u.fs_id, u.bin_start}] += u.deltas;
    for (auto& [k, c] : output)
      if (!input.count(k)) CHECK(all_zero(c));
    for (auto& [k, c] : input) CHECK(output[k] == c);

    // Each job's share of a node-bin is within one count of its time share.
    std::map<std::string, const JobRecord*> by_id;
    for (const auto& j : f.jobs) by_id[j.job_id] = &j;
    std::map<std::tuple<std::string, std::string, Timestamp>, long double> exact;
    for (const auto& u : f.node_usage)
      for (const auto& j : f.jobs) {
        if (!std::binary_search(j.nodes.begin(), j.nodes.end(), u.node_id)) continue;
        const Timestamp lo = std::max(j.start_ts, u.bin_start);
        const Timestamp hi = std::min(j.end_ts, u.bin_start + f.bin_width);
        if (hi <= lo) continue;
        exact[{j.job_id, u.fs_id, u.bin_start}] +=
            static_cast<long double>(u.deltas[index(OpKind::ReadKb)]) * (hi - lo) / f.bin_width;
      }
    for (const auto& u : r.job_usage) {
      const auto nodes = by_id.at(u.job_id)->nodes.size();
      CHECK(std::abs(u.deltas[index(OpKind::ReadKb)] - exact[{u.job_id, u.fs_id, u.bin_start}]) <=
            static_cast<long double>(nodes));
      CHECK(u.bin_start >= support::floor_bin(by_id.at(u.job_id)->start_ts, f.bin_width));
      CHECK(u.bin_start < by_id.at(u.job_id)->end_ts);
    }
  }
}

TEST_CASE("attribution is deterministic and order independent") {
  std::mt19937_64 rng(9);
  auto f = support::random_fixture(rng, 15, 10, 20, {"fs1"});
  auto a = attribute_usage(f.node_usage, f.jobs, f.bin_width);
  auto usage = f.node_usage;
  auto jobs = f.jobs;
  std::shuffle(usage.begin(), usage.end(), rng);
  std::shuffle(jobs.begin(), jobs.end(), rng);
  auto b = attribute_usage(usage, jobs, f.bin_width);
  CHECK(a.job_usage == b.job_usage);
  CHECK(a.unattributed == b.unattributed);
}

TEST_CASE("job and fs usage files round trip") {
  std::mt19937_64 rng(2);
  auto f = support::random_fixture(rng, 10, 8, 12, {"fs1", "fs2"});
  auto r = attribute_usage(f.node_usage, f.jobs, f.bin_width);
  std::ostringstream j, u;
  write_job_usage(j, r.job_usage);
  write_fs_usage(u, r.unattributed);
  std::istringstream ji(j.str()), ui(u.str());
  CHECK(read_job_usage(ji) == r.job_usage);
  CHECK(read_fs_usage(ui) == r.unattributed);
}
