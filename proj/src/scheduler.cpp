// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/scheduler.hpp"

#include <cmath>
#include <limits>

namespace cellpilot {

Allocation allocate(double cell_bandwidth_hz, std::span<const ActiveUe> ues,
                    std::span<const double> rate_caps) {
  Allocation out;
  out.cell_bandwidth_hz = cell_bandwidth_hz;
  const std::size_t n = ues.size();
  if (n == 0) {
    out.available_bandwidth_hz = cell_bandwidth_hz;
    return out;
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Bandwidth that would exactly meet each UE's cap.
  std::vector<double> demand(n, kInf);
  if (!rate_caps.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      const double cap = rate_caps[i];
      if (std::isfinite(cap) && ues[i].se > 0.0) demand[i] = cap / ues[i].se;
    }
  }

  std::vector<double> bw(n, 0.0);
  std::vector<bool> pinned(n, false);
  double remaining = cell_bandwidth_hz;
  std::size_t open = n;
  while (open > 0) {
    const double share = remaining / static_cast<double>(open);
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!pinned[i] && demand[i] <= share) {
        pinned[i] = true;
        bw[i] = demand[i];
        remaining -= demand[i];
        --open;
        changed = true;
      }
    }
    if (!changed) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!pinned[i]) bw[i] = share;
      }
      remaining = 0.0;
      break;
    }
  }

  out.shares.reserve(n);
  double used = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double tput = bw[i] * ues[i].se;
    out.shares.push_back({ues[i].ue, bw[i], tput});
    out.cell_throughput_bps += tput;
    used += bw[i];
  }
  out.available_bandwidth_hz = std::max(0.0, cell_bandwidth_hz - used);
  return out;
}

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_std(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

NetworkThroughput network_throughput(std::span<const Allocation> cells, std::size_t active_ues) {
  NetworkThroughput out;
  out.per_cell_bps.reserve(cells.size());
  for (const auto& a : cells) {
    out.per_cell_bps.push_back(a.cell_throughput_bps);
    out.total_bps += a.cell_throughput_bps;
  }
  out.per_ue_mean_bps = active_ues > 0 ? out.total_bps / static_cast<double>(active_ues) : 0.0;
  out.per_cell_std_bps = population_std(out.per_cell_bps);
  return out;
}

}  // namespace cellpilot
