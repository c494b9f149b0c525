// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_TESTS_TEST_SUPPORT_HPP_
#define CELLPILOT_TESTS_TEST_SUPPORT_HPP_

#include <filesystem>
#include <string>

#include "cellpilot/rng.hpp"
#include "cellpilot/topology.hpp"

namespace cellpilot::testing {

inline std::filesystem::path data_dir() { return CELLPILOT_DATA_DIR; }

/// Fresh directory under the system temp dir, removed first if present.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("cellpilot-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Cell make_cell(const std::string& id, double freq_hz, int priority, Point pos = {0, 0},
                      double azimuth = 0.0, double beamwidth = 120.0) {
  Cell c;
  c.id = id;
  c.tower_id = "T1";
  c.position = pos;
  c.azimuth_deg = azimuth;
  c.beamwidth_deg = beamwidth;
  c.frequency_hz = freq_hz;
  c.bandwidth_hz = 20e6;
  c.priority = priority;
  c.tx_power_dbm = 43.0;
  return c;
}

/// Area with one tower, the given cells and nothing else.
inline Topology bare_topology(std::vector<Cell> cells, Rect area = {0, 0, 1000, 1000}) {
  Topology t;
  t.area = area;
  t.towers.push_back({"T1", cells.empty() ? Point{0, 0} : cells.front().position});
  t.cells = std::move(cells);
  return t;
}

}  // namespace cellpilot::testing

#endif  // CELLPILOT_TESTS_TEST_SUPPORT_HPP_
