#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace iorisk {

/// Lustre client counters, in feed column order. The first five are served by
/// the object storage servers (OSS), the remaining sixteen by the metadata
/// server (MDS).
enum class OpKind : std::uint8_t {
  ReadKb,
  ReadOps,
  WriteKb,
  WriteOps,
  Other,
  Open,
  Close,
  Mknod,
  Link,
  Unlink,
  Mkdir,
  Rmdir,
  Ren,
  Getattr,
  Setattr,
  Getxattr,
  Setxattr,
  Statfs,
  Sync,
  Sdr,
  Cdr,
};

enum class OpClass : std::uint8_t { Oss, Mds };

inline constexpr std::size_t kOpCount = 21;
inline constexpr std::size_t kOssOpCount = 5;
inline constexpr std::size_t kMdsOpCount = kOpCount - kOssOpCount;

/// Non-negative counter values. KiB for read_kb/write_kb, operations otherwise.
using Count = std::int64_t;
using Counters = std::array<Count, kOpCount>;

constexpr std::size_t index(OpKind op) { return static_cast<std::size_t>(op); }

constexpr OpClass op_class(OpKind op) {
  return index(op) < kOssOpCount ? OpClass::Oss : OpClass::Mds;
}

std::string_view op_name(OpKind op);
std::optional<OpKind> op_from_name(std::string_view name);

inline constexpr std::array<OpKind, kOpCount> kAllOps = [] {
  std::array<OpKind, kOpCount> ops{};
  for (std::size_t i = 0; i < kOpCount; ++i) ops[i] = static_cast<OpKind>(i);
  return ops;
}();

inline Counters& operator+=(Counters& lhs, const Counters& rhs) {
  for (std::size_t i = 0; i < kOpCount; ++i) lhs[i] += rhs[i];
  return lhs;
}

inline bool all_zero(const Counters& c) {
  for (Count v : c)
    if (v != 0) return false;
  return true;
}

inline Count mds_total(const Counters& c) {
  Count total = 0;
  for (std::size_t i = kOssOpCount; i < kOpCount; ++i) total += c[i];
  return total;
}

}  // namespace iorisk
