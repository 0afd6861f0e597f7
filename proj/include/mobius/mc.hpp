#pragma once

// Monte Carlo bookkeeping: batch-means standard errors, truncation metadata.

#include <cstdint>
#include <vector>

#include "mobius/common.hpp"

namespace mobius {

struct MCEstimate {
  double mean = 0;
  double std_error = 0;
  std::int64_t n_samples = 0;
  double r_min = 0, r_max = 0;  // truncation window when applicable
  double tail_bound = 0;        // analytic bound on the discarded measure
  double discard_rate = 0;
};

// Batch-means estimate from a full value vector (deterministic: fixed batch
// count, contiguous batches).
inline MCEstimate mc_from_values(const std::vector<double>& vals, int nb = 64) {
  MCEstimate e;
  std::int64_t n = static_cast<std::int64_t>(vals.size());
  e.n_samples = n;
  if (n == 0) return e;
  double total = 0;
  for (double v : vals) total += v;
  e.mean = total / n;
  nb = static_cast<int>(std::min<std::int64_t>(nb, std::max<std::int64_t>(1, n / 2)));
  std::int64_t bs = n / nb;
  if (bs < 1 || nb < 2) {
    e.std_error = 0;
    return e;
  }
  double var = 0;
  for (int b = 0; b < nb; ++b) {
    double m = 0;
    for (std::int64_t i = b * bs; i < (b + 1) * bs; ++i) m += vals[i];
    m /= bs;
    var += sq(m - e.mean);
  }
  var /= (nb - 1);
  e.std_error = std::sqrt(var / nb);
  return e;
}

}  // namespace mobius
