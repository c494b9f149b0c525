// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_SCHEDULER_HPP_
#define CELLPILOT_SCHEDULER_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace cellpilot {

struct ActiveUe {
  std::size_t ue;
  double se;  // bit/s/Hz, >= 0
};

struct UeShare {
  std::size_t ue;
  double bandwidth_hz;
  double throughput_bps;
};

struct Allocation {
  std::vector<UeShare> shares;  // same order as the input
  double cell_bandwidth_hz = 0.0;
  double cell_throughput_bps = 0.0;
  double available_bandwidth_hz = 0.0;
};

/// Resource-fair water-filling. Without caps every UE gets bandwidth/N. With
/// caps (bit/s, +inf for none) a UE whose cap is reachable with less than the
/// current fair share is pinned at the bandwidth that meets it, and the
/// surplus is split among the rest, until no further UE can be pinned.
Allocation allocate(double cell_bandwidth_hz, std::span<const ActiveUe> ues,
                    std::span<const double> rate_caps = {});

struct NetworkThroughput {
  double total_bps = 0.0;
  std::vector<double> per_cell_bps;
  double per_ue_mean_bps = 0.0;    // over all ACTIVE UEs, unserved ones at 0
  double per_cell_std_bps = 0.0;   // population std over all cells
};

/// `active_ues` counts every ACTIVE UE in the network, including ones with no
/// serving cell. An empty active set yields a per-UE mean of 0.
NetworkThroughput network_throughput(std::span<const Allocation> cells, std::size_t active_ues);

double population_std(std::span<const double> v);
double mean_of(std::span<const double> v);

}  // namespace cellpilot

#endif  // CELLPILOT_SCHEDULER_HPP_
