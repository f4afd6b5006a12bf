#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "iorisk/attribute.hpp"

namespace support {

using iorisk::BinnedNodeUsage;
using iorisk::Counters;
using iorisk::JobRecord;
using iorisk::Timestamp;

inline constexpr Timestamp kT0 = 1'600'000'200;

inline std::string node_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "n%03zu", i);
  return buf;
}

inline Timestamp floor_bin(Timestamp ts, Timestamp w) {
  return ts - (((ts % w) + w) % w);
}

struct Fixture {
  std::vector<JobRecord> jobs;
  std::vector<BinnedNodeUsage> node_usage;
  Timestamp bin_width = 360;
};

// Random exclusive allocation of up to `max_jobs` jobs over `nodes` nodes and
// `bins` bins, plus random per-node-bin usage on every fs. mkdir is kept
// sparse so its average falls under the small-average threshold, and "other"
// stays zero so one OSS counter has a zero baseline.
inline Fixture random_fixture(std::mt19937_64& rng, std::size_t max_jobs, std::size_t nodes,
                              std::size_t bins, const std::vector<std::string>& filesystems) {
  Fixture f;
  const Timestamp w = f.bin_width;
  const Timestamp end = kT0 + static_cast<Timestamp>(bins) * w;
  std::vector<Timestamp> free_at(nodes, kT0);
  auto uni = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  for (std::size_t j = 0; j < max_jobs; ++j) {
    std::vector<std::size_t> order(nodes);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return free_at[a] < free_at[b]; });
    const auto k = static_cast<std::size_t>(uni(1, std::min<std::int64_t>(4, nodes)));
    Timestamp start = 0;
    for (std::size_t i = 0; i < k; ++i) start = std::max(start, free_at[order[i]]);
    start += uni(0, 2 * w);
    const Timestamp stop = start + uni(60, 12 * w);
    if (stop > end) break;
    JobRecord job;
    job.job_id = "job" + std::to_string(j);
    job.project = "p" + std::to_string(j % 3);
    job.command = "./app" + std::to_string(j % 5) + " --in data";
    for (std::size_t i = 0; i < k; ++i) {
      job.nodes.push_back(node_name(order[i]));
      free_at[order[i]] = stop;
    }
    std::sort(job.nodes.begin(), job.nodes.end());
    job.start_ts = start;
    job.end_ts = stop;
    job.cores_per_node = 24;
    f.jobs.push_back(std::move(job));
  }
  for (std::size_t n = 0; n < nodes; ++n)
    for (const auto& fs : filesystems)
      for (std::size_t b = 0; b < bins; ++b) {
        BinnedNodeUsage u;
        u.node_id = node_name(n);
        u.fs_id = fs;
        u.bin_start = kT0 + static_cast<Timestamp>(b) * w;
        for (std::size_t op = 0; op < iorisk::kOpCount; ++op) {
          const auto kind = static_cast<iorisk::OpKind>(op);
          if (kind == iorisk::OpKind::Other) continue;
          if (kind == iorisk::OpKind::Mkdir) {
            u.deltas[op] = uni(0, 199) == 0 ? uni(1, 50) : 0;
            continue;
          }
          // Heavy-tailed so some job-bins exceed twice the average.
          const std::int64_t scale = uni(0, 3) == 0 ? 100'000 : 1'000;
          u.deltas[op] = uni(0, 9) == 0 ? 0 : uni(0, scale);
        }
        f.node_usage.push_back(u);
      }
  return f;
}

// Temporary directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("iorisk-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Relative path -> contents for every regular file under `root`.
inline std::vector<std::pair<std::string, std::string>> tree(const std::filesystem::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file())
      out.emplace_back(std::filesystem::relative(e.path(), root).string(), slurp(e.path()));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace support
