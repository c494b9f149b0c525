// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/topogen.hpp"

#include <cmath>
#include <sstream>

#include "cellpilot/errors.hpp"
#include "cellpilot/rng.hpp"

namespace cellpilot {

namespace {

const CarrierSpec kL700{700e6, 10e6, 2};
const CarrierSpec kL1800{1800e6, 20e6, 4};
const CarrierSpec kL2600{2600e6, 20e6, 6};
const CarrierSpec kN3500{3500e6, 100e6, 7};
constexpr double kPresetTxPowerDbm = 36.0;

std::string band_label(const CarrierSpec& c) {
  std::ostringstream os;
  os << 'B' << std::llround(c.frequency_hz / 1e6);
  return os.str();
}

}  // namespace

void TopoGenSpec::validate() const {
  if (!(width_m > 0.0 && height_m > 0.0)) throw ValidationError("topogen: area must be non-empty");
  if (sites.empty()) throw ValidationError("topogen: at least one tower is required");
  if (!(street_spacing_m > street_width_m && street_width_m > 0.0)) {
    throw ValidationError("topogen: street spacing must exceed street width");
  }
  if (!(building_density >= 0.0 && building_density <= 1.0)) {
    throw ValidationError("topogen: building density must be in [0, 1]");
  }
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto& s = sites[i];
    const std::string where = "topogen: tower " + std::to_string(i + 1);
    if (s.sectors < 1) throw ValidationError(where + " needs at least one sector");
    if (s.carriers.empty()) throw ValidationError(where + " needs at least one carrier");
    if (!(s.position.x >= 0.0 && s.position.x <= width_m && s.position.y >= 0.0 &&
          s.position.y <= height_m)) {
      throw ValidationError(where + " lies outside the area");
    }
  }
}

std::vector<std::string> topogen_preset_names() {
  return {"baseline", "alternative", "large", "small"};
}

TopoGenSpec topogen_preset(const std::string& name) {
  TopoGenSpec s;
  // Bundled sites transmit at 36 dBm so that coverage edges fall inside the
  // threshold band of the operator presets.
  s.tx_power_dbm = kPresetTxPowerDbm;
  if (name == "baseline") {
    // 2 towers, 15 cells, 2.36 km^2.
    s.width_m = s.height_m = 1536.0;
    s.street_spacing_m = 128.0;
    s.sites = {{{560.0, 620.0}, 3, 0.0, {kL700, kL1800, kL2600}},
               {{1060.0, 980.0}, 3, 60.0, {kL1800, kN3500}}};
  } else if (name == "alternative") {
    s.width_m = s.height_m = 1536.0;
    s.street_spacing_m = 110.0;
    s.building_density = 0.8;
    s.sites = {{{420.0, 1050.0}, 3, 30.0, {kL1800, kL2600}},
               {{1100.0, 520.0}, 3, 90.0, {kL700, kL1800, kN3500}}};
  } else if (name == "large") {
    // 6 towers, 48 cells, 6.10 km^2.
    s.width_m = s.height_m = 2470.0;
    s.street_spacing_m = 140.0;
    s.sites = {{{420.0, 560.0}, 3, 0.0, {kL700, kL1800, kL2600}},
               {{1240.0, 420.0}, 3, 40.0, {kL700, kL1800, kL2600}},
               {{2060.0, 640.0}, 3, 80.0, {kL700, kL1800, kL2600}},
               {{560.0, 1880.0}, 3, 20.0, {kL700, kL1800, kL2600}},
               {{1300.0, 1320.0}, 3, 60.0, {kL1800, kN3500}},
               {{2000.0, 1960.0}, 3, 100.0, {kL1800, kN3500}}};
  } else if (name == "small") {
    s.width_m = s.height_m = 1200.0;
    s.street_spacing_m = 100.0;
    s.sites = {{{600.0, 600.0}, 3, 0.0, {kL1800, kL2600}}};
  } else {
    throw ValidationError("unknown topology preset '" + name +
                          "' (expected baseline, alternative, large or small)");
  }
  return s;
}

TopoGenSpec topogen_grid(double width_m, double height_m, int towers, int sectors, int carriers,
                         double building_density, double street_spacing_m) {
  static const std::vector<CarrierSpec> ladder{kL1800, kL2600, kN3500, kL700};
  if (towers < 1) throw ValidationError("topogen: towers must be >= 1");
  if (carriers < 1 || carriers > static_cast<int>(ladder.size())) {
    throw ValidationError("topogen: carriers must be in 1.." + std::to_string(ladder.size()));
  }
  TopoGenSpec s;
  s.width_m = width_m;
  s.height_m = height_m;
  s.building_density = building_density;
  s.street_spacing_m = street_spacing_m;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(towers))));
  const int rows = (towers + cols - 1) / cols;
  for (int i = 0; i < towers; ++i) {
    const int r = i / cols;
    const int c = i % cols;
    SiteSpec site;
    site.position = {width_m * (c + 0.5) / cols, height_m * (r + 0.5) / rows};
    site.sectors = sectors;
    site.azimuth_offset_deg = std::fmod(37.0 * i, 360.0 / std::max(sectors, 1));
    site.carriers.assign(ladder.begin(), ladder.begin() + carriers);
    s.sites.push_back(std::move(site));
  }
  return s;
}

Topology generate_topology(const TopoGenSpec& spec, std::uint64_t seed) {
  spec.validate();
  Topology topo;
  topo.area = {0.0, 0.0, spec.width_m, spec.height_m};

  for (std::size_t i = 0; i < spec.sites.size(); ++i) {
    const SiteSpec& site = spec.sites[i];
    const std::string tower_id = "T" + std::to_string(i + 1);
    topo.towers.push_back({tower_id, site.position});
    for (int k = 0; k < site.sectors; ++k) {
      const double az = std::fmod(site.azimuth_offset_deg + 360.0 * k / site.sectors, 360.0);
      for (const auto& carrier : site.carriers) {
        Cell c;
        c.id = tower_id + "-S" + std::to_string(k + 1) + "-" + band_label(carrier);
        c.tower_id = tower_id;
        c.position = site.position;
        c.azimuth_deg = az;
        c.beamwidth_deg = spec.beamwidth_deg;
        c.frequency_hz = carrier.frequency_hz;
        c.bandwidth_hz = carrier.bandwidth_hz;
        c.priority = carrier.priority;
        c.tx_power_dbm = spec.tx_power_dbm;
        topo.cells.push_back(std::move(c));
      }
    }
  }

  // Streets run along block boundaries, offset half a block from the edges.
  const double step = spec.street_spacing_m;
  std::vector<double> xs;
  std::vector<double> ys;
  for (double x = 0.5 * step; x < spec.width_m; x += step) xs.push_back(x);
  for (double y = 0.5 * step; y < spec.height_m; y += step) ys.push_back(y);
  for (double x : xs) topo.streets.push_back({{x, 0.0}, {x, spec.height_m}});
  for (double y : ys) topo.streets.push_back({{0.0, y}, {spec.width_m, y}});

  Rng rng(derive_seed(seed, 0x746f706fULL));
  std::vector<double> bx{0.0};
  bx.insert(bx.end(), xs.begin(), xs.end());
  bx.push_back(spec.width_m);
  std::vector<double> by{0.0};
  by.insert(by.end(), ys.begin(), ys.end());
  by.push_back(spec.height_m);
  const double half = 0.5 * spec.street_width_m;
  for (std::size_t j = 0; j + 1 < by.size(); ++j) {
    for (std::size_t i = 0; i + 1 < bx.size(); ++i) {
      const double keep = rng.uniform();
      // Margins are drawn even for skipped blocks so that density changes do
      // not reshuffle the other buildings.
      const double m[4] = {rng.uniform(2.0, 14.0), rng.uniform(2.0, 14.0), rng.uniform(2.0, 14.0),
                           rng.uniform(2.0, 14.0)};
      if (keep >= spec.building_density) continue;
      const double x0 = bx[i] + (i > 0 ? half : 0.0) + m[0];
      const double x1 = bx[i + 1] - (i + 2 < bx.size() ? half : 0.0) - m[1];
      const double y0 = by[j] + (j > 0 ? half : 0.0) + m[2];
      const double y1 = by[j + 1] - (j + 2 < by.size() ? half : 0.0) - m[3];
      if (x1 - x0 < 8.0 || y1 - y0 < 8.0) continue;
      topo.buildings.push_back({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
    }
  }
  validate(topo);
  return topo;
}

}  // namespace cellpilot
