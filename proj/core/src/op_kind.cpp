#include "iorisk/op_kind.hpp"

namespace iorisk {
namespace {

constexpr std::array<std::string_view, kOpCount> kNames = {
    "read_kb", "read_ops", "write_kb", "write_ops", "other",   "open",
    "close",   "mknod",    "link",     "unlink",    "mkdir",   "rmdir",
    "ren",     "getattr",  "setattr",  "getxattr",  "setxattr", "statfs",
    "sync",    "sdr",      "cdr"};

}  // namespace

std::string_view op_name(OpKind op) { return kNames[index(op)]; }

std::optional<OpKind> op_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kOpCount; ++i)
    if (kNames[i] == name) return static_cast<OpKind>(i);
  return std::nullopt;
}

}  // namespace iorisk
