#include "iorisk/apportion.hpp"

#include <cassert>
#include <stdexcept>

namespace iorisk {
namespace {

__extension__ typedef __int128 i128;

// round(num / den) with ties to even; num >= 0, den > 0.
i128 div_round_half_even(i128 num, i128 den) {
  i128 q = num / den;
  i128 r = num % den;
  i128 twice = 2 * r;
  if (twice > den || (twice == den && (q & 1) != 0)) ++q;
  return q;
}

std::int64_t weight_sum(std::span<const std::int64_t> weights) {
  std::int64_t sum = 0;
  for (std::int64_t w : weights) {
    if (w < 0) throw std::invalid_argument("apportion: negative weight");
    sum += w;
  }
  if (sum <= 0) throw std::invalid_argument("apportion: zero weight sum");
  return sum;
}

}  // namespace

std::vector<Count> apportion(Count total,
                             std::span<const std::int64_t> weights) {
  if (total < 0) throw std::invalid_argument("apportion: negative total");
  const std::int64_t sum = weight_sum(weights);
  std::vector<Count> parts(weights.size(), 0);
  std::int64_t running = 0;
  Count assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    running += weights[i];
    Count upto = (running == sum)
                     ? total
                     : static_cast<Count>(div_round_half_even(
                           static_cast<i128>(total) * running, sum));
    parts[i] = upto - assigned;
    assigned = upto;
  }
  assert(assigned == total);
  return parts;
}

void apportion(const Counters& total, std::span<const std::int64_t> weights,
               std::span<Counters> out) {
  if (out.size() != weights.size())
    throw std::invalid_argument("apportion: output size mismatch");
  const std::int64_t sum = weight_sum(weights);
  for (std::size_t op = 0; op < kOpCount; ++op) {
    if (total[op] < 0) throw std::invalid_argument("apportion: negative total");
    std::int64_t running = 0;
    Count assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      running += weights[i];
      Count upto = (running == sum)
                       ? total[op]
                       : static_cast<Count>(div_round_half_even(
                             static_cast<i128>(total[op]) * running, sum));
      out[i][op] = upto - assigned;
      assigned = upto;
    }
  }
}

}  // namespace iorisk
