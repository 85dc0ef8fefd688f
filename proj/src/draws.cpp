#include "ogs/draws.hpp"

#include <bit>
#include <stdexcept>

namespace ogs {

ThresholdDraw sample_threshold_multiplier(int granularity, Rng& rng) {
  if (granularity < 1)
    throw std::invalid_argument("threshold granularity must be >= 1");
  // Leading zeros of a uniform 64-bit word are geometric with
  // Pr[k] = 2^-(k+1), exactly the multiplier distribution.
  const std::uint64_t u = rng.next();
  const int k = u == 0 ? 64 : std::countl_zero(u);
  ThresholdDraw d;
  d.k = k;
  d.granularity = granularity;
  d.tau_bar =
      k >= granularity ? 0.0 : 1.0 - static_cast<double>(k) / granularity;
  return d;
}

}  // namespace ogs
