// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_RADIO_HPP_
#define CELLPILOT_RADIO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "cellpilot/topology.hpp"

namespace cellpilot {

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

struct PropagationConfig {
  double main_lobe_gain_db = 10.0;
  double off_lobe_gain_db = 0.0;
  double wall_loss_db = 6.0;
  double noise_density_dbm_hz = -174.0;
  bool obstruction_enabled = false;

  void validate() const;
};

/// Nearest-neighbour SNR -> spectral efficiency mapping.
class SeTable {
 public:
  struct Entry {
    double snr_db;
    double se;  // bit/s/Hz
  };

  SeTable() = default;
  /// Throws ValidationError unless snr is strictly ascending, se is
  /// non-decreasing and non-negative.
  explicit SeTable(std::vector<Entry> entries);

  /// Truncated Shannon sampled at -10..19 dB, capped at 7.8 bit/s/Hz.
  static SeTable default_table();
  /// Two-column text, '#' comments.
  static SeTable parse(const std::string& text, const std::string& origin = "<string>");
  static SeTable load(const std::filesystem::path& path);
  std::string to_text() const;

  const std::vector<Entry>& entries() const { return entries_; }

  /// Entry with the nearest snr; equidistant ties go to the lower snr.
  double lookup(double snr_db) const;

 private:
  std::vector<Entry> entries_;
};

/// Free-space path loss in dB; distances under 1 m are clamped to 1 m.
double path_loss_db(double distance_m, double frequency_hz);

/// Sector pattern: main lobe when the bearing is within beamwidth/2 of the
/// azimuth (inclusive), off lobe elsewhere.
double antenna_gain_db(const Cell& cell, Point ue_pos, const PropagationConfig& cfg = {});

/// Received power. `walls` is the wall-crossing count for the path; it only
/// contributes when obstruction is enabled.
double rx_power_dbm(const Cell& cell, Point ue_pos, int walls, const PropagationConfig& cfg);
double rx_power_dbm(const Cell& cell, Point ue_pos, const Topology& topo,
                    const PropagationConfig& cfg);

double noise_floor_dbm(double bandwidth_hz, const PropagationConfig& cfg);
/// Noise-limited SNR (no interference term).
double snr_db(double rx_dbm, double bandwidth_hz, const PropagationConfig& cfg);

inline double spectral_efficiency(double snr, const SeTable& table) { return table.lookup(snr); }

}  // namespace cellpilot

#endif  // CELLPILOT_RADIO_HPP_
