// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/traffic.hpp"

#include "cellpilot/errors.hpp"

namespace cellpilot {

void TrafficConfig::validate() const {
  if (!(lambda_idle > 0.0) || !(lambda_active > 0.0)) {
    throw ValidationError("traffic: mode switching rates must be > 0");
  }
  if (speed_kmh < 0.0) throw ValidationError("traffic: speed must be >= 0");
  if (speed_spread < 0.0 || speed_spread >= 1.0) {
    throw ValidationError("traffic: speed_spread must be in [0, 1)");
  }
  if (street_weight < 0.0 || street_weight > 1.0) {
    throw ValidationError("traffic: street_weight must be in [0, 1]");
  }
}

std::vector<UeState> init_population(std::size_t n, const Topology& topo,
                                     std::uint64_t episode_seed, const TrafficConfig& cfg) {
  std::vector<UeState> ues(n);
  for (std::size_t i = 0; i < n; ++i) {
    UeState& ue = ues[i];
    ue.id = i;
    ue.rng = Rng(derive_seed(episode_seed, i));
    const UePlacement place = sample_ue_position(topo, ue.rng, cfg.street_weight);
    ue.position = place.position;
    ue.indoor = place.indoor;
    ue.zone = place.zone;
    ue.arc_position = place.arc_position;
    ue.mode = ue.rng.uniform() < 0.5 ? UeMode::active : UeMode::idle;
    ue.next_switch_time = ue.rng.exponential(cfg.rate(ue.mode));
    ue.speed_mps = cfg.speed_kmh / 3.6 *
                   ue.rng.uniform(1.0 - cfg.speed_spread, 1.0 + cfg.speed_spread);
    ue.direction = ue.rng.uniform() < 0.5 ? 1 : -1;
    ue.timers = ReselectTimers(topo.cell_count());
  }
  return ues;
}

std::size_t step_modes(std::vector<UeState>& ues, double t, double dt, const TrafficConfig& cfg) {
  std::size_t flips = 0;
  const double end = t + dt;
  for (auto& ue : ues) {
    while (ue.next_switch_time <= end) {
      ue.mode = ue.mode == UeMode::idle ? UeMode::active : UeMode::idle;
      ue.next_switch_time += ue.rng.exponential(cfg.rate(ue.mode));
      ++flips;
    }
  }
  return flips;
}

void step_mobility(std::vector<UeState>& ues, const Topology& topo, double dt,
                   const TrafficConfig& cfg) {
  if (!cfg.mobility_enabled) return;
  for (auto& ue : ues) {
    if (ue.indoor || ue.zone.kind != ZoneKind::street) continue;
    const auto& street = topo.streets[ue.zone.index];
    const double len = polyline_length(street);
    double s = ue.arc_position + ue.direction * ue.speed_mps * dt;
    while (s < 0.0 || s > len) {
      if (s > len) s = 2.0 * len - s;
      else s = -s;
      ue.direction = -ue.direction;
    }
    ue.arc_position = s;
    ue.position = point_along(street, s);
  }
}

}  // namespace cellpilot
