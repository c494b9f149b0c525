// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_TOPOGEN_HPP_
#define CELLPILOT_TOPOGEN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "cellpilot/topology.hpp"

namespace cellpilot {

struct CarrierSpec {
  double frequency_hz;
  double bandwidth_hz;
  int priority;
};

struct SiteSpec {
  Point position;
  int sectors = 3;
  double azimuth_offset_deg = 0.0;
  std::vector<CarrierSpec> carriers;
};

/// Synthetic scenario: a street grid over a rectangular area with one
/// rectangular building per block (kept with probability building_density)
/// and multi-carrier sectorized sites.
struct TopoGenSpec {
  double width_m = 1000.0;
  double height_m = 1000.0;
  std::vector<SiteSpec> sites;
  double street_spacing_m = 120.0;
  double street_width_m = 12.0;
  double building_density = 0.7;
  double tx_power_dbm = kDefaultTxPowerDbm;
  double beamwidth_deg = kDefaultBeamwidthDeg;

  void validate() const;
};

/// "baseline", "alternative", "large" or "small".
TopoGenSpec topogen_preset(const std::string& name);
std::vector<std::string> topogen_preset_names();

/// Towers on a regular grid, each with `sectors` sectors on the first
/// `carriers` entries of the default band ladder.
TopoGenSpec topogen_grid(double width_m, double height_m, int towers, int sectors, int carriers,
                         double building_density, double street_spacing_m);

/// Deterministic for a given spec and seed; the seed only shapes buildings.
Topology generate_topology(const TopoGenSpec& spec, std::uint64_t seed);

}  // namespace cellpilot

#endif  // CELLPILOT_TOPOGEN_HPP_
