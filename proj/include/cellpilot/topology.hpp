// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_TOPOLOGY_HPP_
#define CELLPILOT_TOPOLOGY_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cellpilot/geometry.hpp"
#include "cellpilot/rng.hpp"

namespace cellpilot {

inline constexpr int kTopologyFormatVersion = 1;
inline constexpr double kDefaultTxPowerDbm = 43.0;
inline constexpr double kDefaultBeamwidthDeg = 120.0;

struct Tower {
  std::string id;
  Point position;
};

struct Cell {
  std::string id;
  std::string tower_id;
  Point position;
  double azimuth_deg = 0.0;
  double beamwidth_deg = kDefaultBeamwidthDeg;
  double frequency_hz = 0.0;
  double bandwidth_hz = 0.0;
  int priority = 0;
  double tx_power_dbm = kDefaultTxPowerDbm;
};

/// Geographic scenario. Immutable after load; cells are addressed by their
/// declaration index everywhere in the simulator, and "lowest cell id" tie
/// breaks refer to that index.
struct Topology {
  Rect area;
  std::vector<Tower> towers;
  std::vector<Cell> cells;
  std::vector<Polygon> buildings;
  std::vector<Polyline> streets;

  std::size_t cell_count() const { return cells.size(); }
};

enum class ZoneKind { street, building };

struct PlacementZone {
  ZoneKind kind;
  std::size_t index;  // into Topology::streets or Topology::buildings
};

struct UePlacement {
  Point position;
  bool indoor = false;
  PlacementZone zone{ZoneKind::street, 0};
  double arc_position = 0.0;  // meters along the street; streets only
};

/// Parses and validates a topology document. `origin` names the source in
/// error messages.
Topology parse_topology(const std::string& text, const std::string& origin = "<string>");
Topology load_topology(const std::filesystem::path& path);

/// Canonical text form; parse_topology(to_text(t)) reproduces t exactly.
std::string to_text(const Topology& topo);
void save_topology(const Topology& topo, const std::filesystem::path& path);

/// Throws ValidationError naming the first violated invariant.
void validate(const Topology& topo);

/// FNV-1a over the canonical text.
std::uint64_t topology_hash(const Topology& topo);

/// Number of building walls crossed by the line of sight a -> b.
int wall_crossings(Point a, Point b, const Topology& topo);

/// Draws a UE position. A street is chosen with probability `street_weight`
/// (when both zone kinds exist), then a street by length and a point uniform in
/// arc length, or a building by area and a point uniform inside it.
UePlacement sample_ue_position(const Topology& topo, Rng& rng, double street_weight = 0.5);

}  // namespace cellpilot

#endif  // CELLPILOT_TOPOLOGY_HPP_
