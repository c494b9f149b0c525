// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_TRAFFIC_HPP_
#define CELLPILOT_TRAFFIC_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "cellpilot/reselect.hpp"
#include "cellpilot/rng.hpp"
#include "cellpilot/topology.hpp"

namespace cellpilot {

enum class UeMode { idle, active };

struct TrafficConfig {
  double lambda_idle = 0.2;    // 1/s, rate of leaving IDLE (mean IDLE dwell 1/lambda)
  double lambda_active = 0.2;  // 1/s, rate of leaving ACTIVE
  bool mobility_enabled = false;
  double speed_kmh = 30.0;     // mean; per-UE speed uniform in +-speed_spread
  double speed_spread = 0.2;   // relative half-width
  double street_weight = 0.5;  // probability of placing a UE on a street

  void validate() const;
  /// Mean dwell time over both modes, seconds.
  double mean_dwell() const { return 0.5 * (1.0 / lambda_idle + 1.0 / lambda_active); }
  double rate(UeMode m) const { return m == UeMode::idle ? lambda_idle : lambda_active; }
};

struct UeState {
  std::size_t id = 0;
  Point position;
  bool indoor = false;
  PlacementZone zone{ZoneKind::street, 0};
  double arc_position = 0.0;
  int direction = 1;
  double speed_mps = 0.0;
  UeMode mode = UeMode::idle;
  std::optional<std::size_t> serving;
  double next_switch_time = 0.0;
  ReselectTimers timers;
  Rng rng;
};

/// n UEs, UE i driven by the stream derive_seed(episode_seed, i). Placement,
/// initial mode (50/50), first dwell, speed and heading are drawn from it in
/// that order.
std::vector<UeState> init_population(std::size_t n, const Topology& topo,
                                     std::uint64_t episode_seed, const TrafficConfig& cfg);

/// Flips the mode of every UE whose switch time falls in (t, t + dt] and draws
/// the next dwell from the UE's own stream. Returns the number of flips.
std::size_t step_modes(std::vector<UeState>& ues, double t, double dt, const TrafficConfig& cfg);

/// Moves street UEs speed*dt along their street, reflecting at the ends.
/// Indoor UEs stay put. No-op when mobility is disabled.
void step_mobility(std::vector<UeState>& ues, const Topology& topo, double dt,
                   const TrafficConfig& cfg);

}  // namespace cellpilot

#endif  // CELLPILOT_TRAFFIC_HPP_
