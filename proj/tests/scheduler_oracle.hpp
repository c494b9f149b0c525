// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_TESTS_SCHEDULER_ORACLE_HPP_
#define CELLPILOT_TESTS_SCHEDULER_ORACLE_HPP_

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace cellpilot::testing {

/// Max-min fair bandwidth by enumerating which UEs sit at their cap. A UE
/// at its cap needs demand <= the equal share of the rest; the others need
/// demand > share. `demand` holds cap / se, or +inf when uncapped.
inline std::optional<std::vector<double>> waterfill_oracle(double bandwidth,
                                                           const std::vector<double>& demand) {
  const std::size_t n = demand.size();
  const double tol = 1e-9 * bandwidth;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double pinned = 0.0;
    std::size_t open = 0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        if (!std::isfinite(demand[i])) finite = false;
        pinned += demand[i];
      } else {
        ++open;
      }
    }
    if (!finite || pinned > bandwidth + tol) continue;
    const double share =
        open > 0 ? (bandwidth - pinned) / static_cast<double>(open) : std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const bool in = mask & (1u << i);
      if (in && demand[i] > share + tol) ok = false;
      if (!in && demand[i] < share - tol) ok = false;
    }
    if (!ok) continue;
    std::vector<double> bw(n);
    for (std::size_t i = 0; i < n; ++i) bw[i] = (mask & (1u << i)) ? demand[i] : share;
    return bw;
  }
  return std::nullopt;
}

}  // namespace cellpilot::testing

#endif  // CELLPILOT_TESTS_SCHEDULER_ORACLE_HPP_
