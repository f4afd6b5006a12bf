#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "iorisk/op_kind.hpp"

namespace iorisk {

using Timestamp = std::int64_t;  // unix seconds

constexpr Timestamp floor_div(Timestamp a, Timestamp b) {
  Timestamp q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

/// Start of the bin of width `width` that contains `ts`.
constexpr Timestamp bin_floor(Timestamp ts, Timestamp width) {
  return floor_div(ts, width) * width;
}

/// Splits `total` into integer parts proportional to `weights`.
///
/// Part i is round(total * W_i / W) - round(total * W_{i-1} / W) where W_i is
/// the running weight sum and rounding is half-to-even, so every part is
/// non-negative, zero-weight entries get zero, and the parts sum to `total`
/// exactly. The last positive-weight entry absorbs the rounding residue.
/// Requires total >= 0, weights >= 0 and a positive weight sum.
std::vector<Count> apportion(Count total, std::span<const std::int64_t> weights);

/// Same rule applied to every counter of `total`; `out[i]` receives the share
/// for `weights[i]`.
void apportion(const Counters& total, std::span<const std::int64_t> weights,
               std::span<Counters> out);

}  // namespace iorisk
