// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cellpilot/errors.hpp"
#include "cellpilot/text_util.hpp"

namespace cellpilot {

void PropagationConfig::validate() const {
  if (wall_loss_db < 0.0) throw ValidationError("propagation: wall_loss must be >= 0");
  if (!(noise_density_dbm_hz < 0.0)) {
    throw ValidationError("propagation: noise_density must be < 0 dBm/Hz");
  }
}

SeTable::SeTable(std::vector<Entry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ValidationError("SE table is empty");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].se < 0.0) throw ValidationError("SE table: negative spectral efficiency");
    if (i > 0) {
      if (!(entries_[i].snr_db > entries_[i - 1].snr_db)) {
        throw ValidationError("SE table: snr column must be strictly ascending");
      }
      if (entries_[i].se < entries_[i - 1].se) {
        throw ValidationError("SE table: se column must be non-decreasing");
      }
    }
  }
}

SeTable SeTable::default_table() {
  std::vector<Entry> rows;
  for (int snr = -10; snr <= 19; ++snr) {
    const double shannon = std::log2(1.0 + std::pow(10.0, snr / 10.0));
    rows.push_back({static_cast<double>(snr), std::min(shannon, 7.8)});
  }
  return SeTable(std::move(rows));
}

SeTable SeTable::parse(const std::string& text, const std::string& origin) {
  std::vector<Entry> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": expected 'snr_db se'");
    }
    try {
      rows.push_back({parse_double(tokens[0]), parse_double(tokens[1])});
    } catch (const std::invalid_argument& e) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return SeTable(std::move(rows));
}

SeTable SeTable::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

std::string SeTable::to_text() const {
  std::ostringstream os;
  os << "# snr_db se_bit_per_s_per_hz\n";
  for (const auto& e : entries_) os << format_double(e.snr_db) << ' ' << format_double(e.se) << "\n";
  return os.str();
}

double SeTable::lookup(double snr_db) const {
  // First entry with snr >= input; compare against its predecessor.
  auto it = std::lower_bound(entries_.begin(), entries_.end(), snr_db,
                             [](const Entry& e, double v) { return e.snr_db < v; });
  if (it == entries_.begin()) return it->se;
  if (it == entries_.end()) return entries_.back().se;
  const auto prev = std::prev(it);
  return (snr_db - prev->snr_db) <= (it->snr_db - snr_db) ? prev->se : it->se;
}

double path_loss_db(double distance_m, double frequency_hz) {
  const double d = std::max(distance_m, 1.0);
  return 20.0 * std::log10(4.0 * std::numbers::pi * d * frequency_hz / kSpeedOfLight);
}

double antenna_gain_db(const Cell& cell, Point ue_pos, const PropagationConfig& cfg) {
  if (cell.beamwidth_deg >= 360.0) return cfg.main_lobe_gain_db;
  const double offset = angular_offset_deg(bearing_deg(cell.position, ue_pos), cell.azimuth_deg);
  return offset <= cell.beamwidth_deg / 2.0 ? cfg.main_lobe_gain_db : cfg.off_lobe_gain_db;
}

double rx_power_dbm(const Cell& cell, Point ue_pos, int walls, const PropagationConfig& cfg) {
  double rx = cell.tx_power_dbm + antenna_gain_db(cell, ue_pos, cfg) -
              path_loss_db(distance(cell.position, ue_pos), cell.frequency_hz);
  if (cfg.obstruction_enabled) rx -= cfg.wall_loss_db * walls;
  return rx;
}

double rx_power_dbm(const Cell& cell, Point ue_pos, const Topology& topo,
                    const PropagationConfig& cfg) {
  const int walls = cfg.obstruction_enabled && !(ue_pos == cell.position)
                        ? wall_crossings(cell.position, ue_pos, topo)
                        : 0;
  return rx_power_dbm(cell, ue_pos, walls, cfg);
}

double noise_floor_dbm(double bandwidth_hz, const PropagationConfig& cfg) {
  return cfg.noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz);
}

double snr_db(double rx_dbm, double bandwidth_hz, const PropagationConfig& cfg) {
  return rx_dbm - noise_floor_dbm(bandwidth_hz, cfg);
}

}  // namespace cellpilot
