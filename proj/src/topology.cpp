// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/topology.hpp"

#include <set>
#include <sstream>
#include <unordered_map>

#include "cellpilot/errors.hpp"
#include "cellpilot/text_util.hpp"

namespace cellpilot {

namespace {

struct LineContext {
  const std::string& origin;
  std::size_t line_no;
  const std::vector<std::string>& tokens;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(origin + ":" + std::to_string(line_no) + ": " + what);
  }

  double number(std::size_t i, const char* field) const {
    if (i >= tokens.size()) fail(std::string("missing field '") + field + "'");
    try {
      return parse_double(tokens[i]);
    } catch (const std::invalid_argument&) {
      fail(std::string("field '") + field + "': expected a number, got '" + tokens[i] + "'");
    }
  }

  int integer(std::size_t i, const char* field) const {
    if (i >= tokens.size()) fail(std::string("missing field '") + field + "'");
    try {
      return static_cast<int>(parse_int(tokens[i]));
    } catch (const std::invalid_argument&) {
      fail(std::string("field '") + field + "': expected an integer, got '" + tokens[i] + "'");
    }
  }

  std::vector<Point> points(std::size_t first, std::size_t min_count, const char* what) const {
    const std::size_t n = tokens.size() - first;
    if (n % 2 != 0) fail(std::string(what) + ": odd number of coordinates");
    if (n / 2 < min_count) {
      fail(std::string(what) + ": needs at least " + std::to_string(min_count) + " vertices");
    }
    std::vector<Point> pts;
    for (std::size_t i = first; i < tokens.size(); i += 2) {
      pts.push_back({number(i, "x"), number(i + 1, "y")});
    }
    return pts;
  }
};

bool rect_intersects(const Rect& a, const Rect& b) {
  return a.min_x <= b.max_x && b.min_x <= a.max_x && a.min_y <= b.max_y && b.min_y <= a.max_y;
}

}  // namespace

Topology parse_topology(const std::string& text, const std::string& origin) {
  Topology topo;
  bool have_header = false;
  bool have_area = false;
  std::unordered_map<std::string, std::size_t> tower_index;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto tokens = split_ws(raw);
    if (tokens.empty()) continue;
    const LineContext ctx{origin, line_no, tokens};
    const std::string& key = tokens[0];

    if (!have_header) {
      if (key != "cellpilot-topology") ctx.fail("expected header 'cellpilot-topology <version>'");
      const int version = ctx.integer(1, "version");
      if (version != kTopologyFormatVersion) {
        throw VersionError(origin + ":" + std::to_string(line_no) +
                           ": unsupported topology version " + std::to_string(version));
      }
      have_header = true;
      continue;
    }

    if (key == "area") {
      if (tokens.size() != 5) ctx.fail("area takes 4 fields: min_x min_y max_x max_y");
      topo.area = {ctx.number(1, "min_x"), ctx.number(2, "min_y"), ctx.number(3, "max_x"),
                   ctx.number(4, "max_y")};
      have_area = true;
    } else if (key == "tower") {
      if (tokens.size() != 4) ctx.fail("tower takes 3 fields: id x y");
      if (tower_index.count(tokens[1])) {
        throw ValidationError(origin + ":" + std::to_string(line_no) + ": duplicate tower id '" +
                              tokens[1] + "'");
      }
      tower_index[tokens[1]] = topo.towers.size();
      topo.towers.push_back({tokens[1], {ctx.number(2, "x"), ctx.number(3, "y")}});
    } else if (key == "cell") {
      if (tokens.size() != 8 && tokens.size() != 9) {
        ctx.fail("cell takes fields: id tower azimuth beamwidth freq_hz bw_hz priority [tx_dbm]");
      }
      Cell c;
      c.id = tokens[1];
      c.tower_id = tokens[2];
      auto it = tower_index.find(c.tower_id);
      if (it == tower_index.end()) ctx.fail("field 'tower': unknown tower '" + c.tower_id + "'");
      c.position = topo.towers[it->second].position;
      c.azimuth_deg = ctx.number(3, "azimuth");
      c.beamwidth_deg = ctx.number(4, "beamwidth");
      c.frequency_hz = ctx.number(5, "freq_hz");
      c.bandwidth_hz = ctx.number(6, "bw_hz");
      c.priority = ctx.integer(7, "priority");
      if (tokens.size() == 9) c.tx_power_dbm = ctx.number(8, "tx_dbm");
      topo.cells.push_back(std::move(c));
    } else if (key == "building") {
      topo.buildings.push_back(ctx.points(1, 3, "building"));
    } else if (key == "street") {
      topo.streets.push_back(ctx.points(1, 2, "street"));
    } else {
      ctx.fail("unknown record '" + key + "'");
    }
  }
  if (!have_header) throw ParseError(origin + ": empty document, missing header");
  if (!have_area) throw ParseError(origin + ": missing 'area' record");
  validate(topo);
  return topo;
}

Topology load_topology(const std::filesystem::path& path) {
  return parse_topology(read_file(path), path.string());
}

void validate(const Topology& topo) {
  const Rect& a = topo.area;
  if (!(a.max_x > a.min_x && a.max_y > a.min_y)) {
    throw ValidationError("area bounds must have positive extent");
  }
  if (topo.cells.empty()) throw ValidationError("topology has no cells");
  std::set<std::string> ids;
  for (const auto& t : topo.towers) {
    if (!ids.insert(t.id).second) throw ValidationError("duplicate tower id '" + t.id + "'");
  }
  std::set<std::string> cell_ids;
  for (const auto& c : topo.cells) {
    if (!cell_ids.insert(c.id).second) throw ValidationError("duplicate cell id '" + c.id + "'");
    if (ids.count(c.id)) throw ValidationError("cell id '" + c.id + "' collides with a tower id");
    if (!a.contains(c.position)) {
      throw ValidationError("cell '" + c.id + "' lies outside the area bounds");
    }
    if (!(c.bandwidth_hz > 0.0)) throw ValidationError("cell '" + c.id + "': bandwidth must be > 0");
    if (!(c.frequency_hz > 0.0)) throw ValidationError("cell '" + c.id + "': frequency must be > 0");
    if (!(c.beamwidth_deg > 0.0 && c.beamwidth_deg <= 360.0)) {
      throw ValidationError("cell '" + c.id + "': beamwidth must be in (0, 360]");
    }
    if (!(c.azimuth_deg >= 0.0 && c.azimuth_deg < 360.0)) {
      throw ValidationError("cell '" + c.id + "': azimuth must be in [0, 360)");
    }
    if (c.priority < 0 || c.priority > 7) {
      throw ValidationError("cell '" + c.id + "': priority must be in 0..7");
    }
  }
  for (std::size_t i = 0; i < topo.buildings.size(); ++i) {
    const auto& b = topo.buildings[i];
    if (b.size() < 3) {
      throw ValidationError("building " + std::to_string(i) + " has fewer than 3 vertices");
    }
    if (!is_simple_polygon(b)) {
      throw ValidationError("building " + std::to_string(i) + " is not a simple polygon");
    }
    if (!rect_intersects(bounding_box(b), a)) {
      throw ValidationError("building " + std::to_string(i) + " does not intersect the area");
    }
  }
  for (std::size_t i = 0; i < topo.streets.size(); ++i) {
    const auto& s = topo.streets[i];
    if (s.size() < 2 || polyline_length(s) <= 0.0) {
      throw ValidationError("street " + std::to_string(i) + " has zero length");
    }
    if (!rect_intersects(bounding_box(s), a)) {
      throw ValidationError("street " + std::to_string(i) + " does not intersect the area");
    }
  }
}

std::string to_text(const Topology& topo) {
  std::ostringstream os;
  os << "cellpilot-topology " << kTopologyFormatVersion << "\n";
  os << "area " << format_double(topo.area.min_x) << ' ' << format_double(topo.area.min_y) << ' '
     << format_double(topo.area.max_x) << ' ' << format_double(topo.area.max_y) << "\n";
  for (const auto& t : topo.towers) {
    os << "tower " << t.id << ' ' << format_double(t.position.x) << ' '
       << format_double(t.position.y) << "\n";
  }
  for (const auto& c : topo.cells) {
    os << "cell " << c.id << ' ' << c.tower_id << ' ' << format_double(c.azimuth_deg) << ' '
       << format_double(c.beamwidth_deg) << ' ' << format_double(c.frequency_hz) << ' '
       << format_double(c.bandwidth_hz) << ' ' << c.priority << ' '
       << format_double(c.tx_power_dbm) << "\n";
  }
  auto points = [&os](const char* key, const std::vector<Point>& pts) {
    os << key;
    for (Point p : pts) os << ' ' << format_double(p.x) << ' ' << format_double(p.y);
    os << "\n";
  };
  for (const auto& b : topo.buildings) points("building", b);
  for (const auto& s : topo.streets) points("street", s);
  return os.str();
}

void save_topology(const Topology& topo, const std::filesystem::path& path) {
  write_file(path, to_text(topo));
}

std::uint64_t topology_hash(const Topology& topo) { return fnv1a64(to_text(topo)); }

int wall_crossings(Point a, Point b, const Topology& topo) {
  int count = 0;
  for (const auto& poly : topo.buildings) count += segment_polygon_crossings(a, b, poly);
  return count;
}

UePlacement sample_ue_position(const Topology& topo, Rng& rng, double street_weight) {
  const bool have_streets = !topo.streets.empty();
  const bool have_buildings = !topo.buildings.empty();
  if (!have_streets && !have_buildings) {
    throw ValidationError("topology has no placement zones (streets or buildings)");
  }
  // The zone-kind draw is always consumed so the stream layout does not
  // depend on which zone kinds exist.
  const double kind_draw = rng.uniform();
  bool on_street = kind_draw < street_weight;
  if (!have_streets) on_street = false;
  if (!have_buildings) on_street = true;

  UePlacement out;
  if (on_street) {
    double total = 0.0;
    for (const auto& s : topo.streets) total += polyline_length(s);
    double pick = rng.uniform() * total;
    std::size_t idx = 0;
    for (; idx + 1 < topo.streets.size(); ++idx) {
      const double len = polyline_length(topo.streets[idx]);
      if (pick < len) break;
      pick -= len;
    }
    const double len = polyline_length(topo.streets[idx]);
    const double s = std::min(pick, len);
    out.position = point_along(topo.streets[idx], s);
    out.indoor = false;
    out.zone = {ZoneKind::street, idx};
    out.arc_position = s;
    return out;
  }

  double total = 0.0;
  for (const auto& b : topo.buildings) total += polygon_area(b);
  double pick = rng.uniform() * total;
  std::size_t idx = 0;
  for (; idx + 1 < topo.buildings.size(); ++idx) {
    const double area = polygon_area(topo.buildings[idx]);
    if (pick < area) break;
    pick -= area;
  }
  const auto& poly = topo.buildings[idx];
  const Rect box = bounding_box(poly);
  Point p;
  do {
    p = {rng.uniform(box.min_x, box.max_x), rng.uniform(box.min_y, box.max_y)};
  } while (!point_in_polygon(p, poly));
  out.position = p;
  out.indoor = true;
  out.zone = {ZoneKind::building, idx};
  return out;
}

}  // namespace cellpilot
