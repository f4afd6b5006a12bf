#pragma once

// Slow, direct reimplementations used as test oracles. Nothing here calls into
// iorisk's computational code; only the plain data types are shared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "iorisk/analytics.hpp"

namespace oracle {

using iorisk::Count;
using iorisk::Counters;
using iorisk::Timestamp;

inline constexpr const char* kOpNames[21] = {
    "read_kb", "read_ops", "write_kb", "write_ops", "other",  "open",     "close",
    "mknod",   "link",     "unlink",   "mkdir",     "rmdir",  "ren",      "getattr",
    "setattr", "getxattr", "setxattr", "statfs",    "sync",   "sdr",      "cdr"};

inline bool is_oss(int op) { return op < 5; }

struct Baseline {
  std::map<std::string, long double> avg;  // by counter name
  long double md_total = 0;
};

// Per-fs means of per-bin totals between the first and last bin seen;
// bins with no row contribute zeros.
inline std::map<std::string, Baseline> baselines(
    const std::vector<iorisk::FsBinUsage>& totals, Timestamp bin_width) {
  std::map<std::string, std::pair<Timestamp, Timestamp>> extent;
  std::map<std::string, std::map<std::string, long double>> sums;
  std::map<std::string, long double> md_sums;
  for (const auto& t : totals) {
    auto it = extent.find(t.fs_id);
    if (it == extent.end())
      extent[t.fs_id] = {t.bin_start, t.bin_start};
    else {
      it->second.first = std::min(it->second.first, t.bin_start);
      it->second.second = std::max(it->second.second, t.bin_start);
    }
    for (int op = 0; op < 21; ++op) {
      sums[t.fs_id][kOpNames[op]] += t.deltas[op];
      if (!is_oss(op)) md_sums[t.fs_id] += t.deltas[op];
    }
  }
  std::map<std::string, Baseline> out;
  for (const auto& [fs, range] : extent) {
    long double bins = (range.second - range.first) / bin_width + 1;
    Baseline b;
    for (int op = 0; op < 21; ++op) b.avg[kOpNames[op]] = sums[fs][kOpNames[op]] / bins;
    b.md_total = md_sums[fs] / bins;
    out[fs] = b;
  }
  return out;
}

struct Risk {
  long double oss = 0, mds = 0;
  std::vector<long double> per_op = std::vector<long double>(21, 0);
};

inline Risk risk(const Counters& x, const Baseline& b, long double alpha, long double beta,
                 long double threshold) {
  Risk r;
  long double job_md = 0;
  for (int op = 5; op < 21; ++op) job_md += x[op];
  for (int op = 0; op < 21; ++op) {
    const long double v = x[op];
    const long double avg = b.avg.at(kOpNames[op]);
    long double c = 0;
    if (is_oss(op)) {
      if (avg > 0) c = (v - alpha * avg) / (alpha * avg);
    } else if (alpha * avg >= threshold && avg > 0) {
      c = (v - alpha * avg) / (alpha * avg);
    } else if (b.md_total > 0) {
      c = (v - beta * b.md_total) / (beta * b.md_total);
    } else if (job_md > 0 && v > 0) {
      const long double floor = threshold > 0 ? threshold : 1;
      c = (v - floor) / floor;
    }
    if (c < 0) c = 0;
    r.per_op[op] = c;
    (is_oss(op) ? r.oss : r.mds) += c;
  }
  return r;
}

inline long double quality(Count ops, Count kb) {
  if (ops == 0 && kb == 0) return 0;
  if (kb == 0) return static_cast<long double>(ops) * 1024;
  return static_cast<long double>(ops) * 1024 / kb;
}

inline std::optional<long double> pearson(const std::vector<long double>& a,
                                          const std::vector<long double>& b) {
  const std::size_t n = a.size();
  long double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

// Pearson over bins present in both, after averaging samples per bin.
inline std::optional<long double> binned_pearson(
    const std::vector<std::pair<Timestamp, double>>& a,
    const std::vector<std::pair<Timestamp, double>>& b, Timestamp bin_width) {
  auto bin_means = [&](const std::vector<std::pair<Timestamp, double>>& s) {
    std::map<Timestamp, std::pair<long double, int>> acc;
    for (auto [ts, v] : s) {
      Timestamp bin = ts - ((ts % bin_width) + bin_width) % bin_width;
      acc[bin].first += v;
      acc[bin].second += 1;
    }
    std::map<Timestamp, long double> out;
    for (auto& [bin, sv] : acc) out[bin] = sv.first / sv.second;
    return out;
  };
  auto ma = bin_means(a), mb = bin_means(b);
  std::vector<long double> xa, xb;
  for (auto& [bin, v] : ma) {
    auto it = mb.find(bin);
    if (it == mb.end()) continue;
    xa.push_back(v);
    xb.push_back(it->second);
  }
  return pearson(xa, xb);
}

// Rows counted from 1: 1 node is row 0, (2^(k-1), 2^k] is row k.
inline int size_row(std::size_t nodes) {
  int k = 0;
  std::size_t top = 1;
  while (top < nodes) {
    top *= 2;
    ++k;
  }
  return k;
}

// Smallest k with v <= 2^k.
inline std::optional<int> measure_exponent(double v) {
  if (v == 0) return std::nullopt;
  int k = 0;
  while (std::ldexp(1.0, k) < v) ++k;
  while (std::ldexp(1.0, k - 1) >= v) --k;
  return k;
}

inline std::map<std::string, std::vector<std::string>> group_by_command(
    const std::vector<iorisk::JobRecord>& jobs) {
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& j : jobs) groups[j.command].push_back(j.job_id);
  return groups;
}

inline Counters random_counters(std::mt19937_64& rng, Count max_value) {
  Counters c{};
  std::uniform_int_distribution<Count> d(0, max_value);
  for (auto& v : c) v = d(rng);
  return c;
}

}  // namespace oracle
