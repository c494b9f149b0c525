// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "cellpilot/errors.hpp"
#include "cellpilot/geometry.hpp"
#include "cellpilot/rng.hpp"
#include "cellpilot/text_util.hpp"
#include "cellpilot/topogen.hpp"
#include "cellpilot/topology.hpp"
#include "test_support.hpp"

using namespace cellpilot;
using cellpilot::testing::bare_topology;
using cellpilot::testing::data_dir;
using cellpilot::testing::make_cell;

namespace {

// Independent per-edge oracle: solves the 2x2 system for every edge.
int edge_oracle(Point a, Point b, const Topology& topo) {
  int n = 0;
  for (const auto& poly : topo.buildings) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point p = poly[i];
      const Point q = poly[(i + 1) % poly.size()];
      const double rx = b.x - a.x, ry = b.y - a.y;
      const double sx = q.x - p.x, sy = q.y - p.y;
      const double den = rx * sy - ry * sx;
      if (den == 0.0) continue;
      const double t = ((p.x - a.x) * sy - (p.y - a.y) * sx) / den;
      const double u = ((p.x - a.x) * ry - (p.y - a.y) * rx) / den;
      if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) ++n;
    }
  }
  return n;
}

Polygon random_quad(Rng& rng) {
  // Convex quadrilateral from four angles around a centre.
  const Point c{rng.uniform(100, 900), rng.uniform(100, 900)};
  const double r = rng.uniform(10, 80);
  Polygon p;
  double ang = rng.uniform(0, 1.5);
  for (int k = 0; k < 4; ++k) {
    p.push_back({c.x + r * std::cos(ang), c.y + r * std::sin(ang)});
    ang += rng.uniform(0.9, 1.6);
  }
  return p;
}

}  // namespace

TEST_SUITE("topology") {
  TEST_CASE("bundled presets have the stated scale") {
    const Topology base = load_topology(data_dir() / "topologies" / "baseline.topo");
    CHECK(base.towers.size() == 2);
    CHECK(base.cells.size() == 15);
    CHECK(base.area.area() / 1e6 == doctest::Approx(2.36).epsilon(0.01));
    const Topology large = load_topology(data_dir() / "topologies" / "large.topo");
    CHECK(large.towers.size() == 6);
    CHECK(large.cells.size() == 48);
    const Topology small = load_topology(data_dir() / "topologies" / "small.topo");
    CHECK(small.cells.size() == 6);
    const Topology alt = load_topology(data_dir() / "topologies" / "alternative.topo");
    CHECK(alt.cells.size() == 15);
  }

  TEST_CASE("bundled files equal the generator output") {
    for (const auto& name : topogen_preset_names()) {
      const Topology gen = generate_topology(topogen_preset(name), 1);
      CHECK(to_text(gen) == read_file(data_dir() / "topologies" / (name + ".topo")));
    }
  }

  TEST_CASE("text round trip is exact") {
    const Topology t = generate_topology(topogen_preset("baseline"), 7);
    const Topology back = parse_topology(to_text(t));
    CHECK(to_text(back) == to_text(t));
    CHECK(topology_hash(back) == topology_hash(t));
  }

  TEST_CASE("duplicate cell id is rejected") {
    Topology t = bare_topology({make_cell("A", 1.8e9, 4, {10, 10}), make_cell("A", 2.6e9, 6, {10, 10})});
    CHECK_THROWS_AS(validate(t), ValidationError);
    CHECK_THROWS_WITH_AS(parse_topology(to_text(t)), doctest::Contains("duplicate cell id"),
                         ValidationError);
  }

  TEST_CASE("parse errors carry line context") {
    const std::string bad = "cellpilot-topology 1\narea 0 0 10\n";
    CHECK_THROWS_WITH_AS(parse_topology(bad, "x.topo"), doctest::Contains("x.topo:2"), ParseError);
    CHECK_THROWS_AS(parse_topology("cellpilot-topology 99\narea 0 0 1 1\n"), VersionError);
    CHECK_THROWS_AS(parse_topology(""), ParseError);
  }

  TEST_CASE("cell outside the area is rejected") {
    Topology t = bare_topology({make_cell("A", 1.8e9, 4, {5000, 10})});
    CHECK_THROWS_AS(validate(t), ValidationError);
  }

  TEST_CASE("wall crossings on a single rectangle") {
    Topology t = bare_topology({make_cell("A", 1.8e9, 4, {10, 10})});
    t.buildings.push_back({{100, 100}, {200, 100}, {200, 200}, {100, 200}});
    CHECK(wall_crossings({0, 0}, {50, 500}, t) == 0);
    CHECK(wall_crossings({50, 150}, {250, 150}, t) == 2);
    CHECK(wall_crossings({50, 150}, {150, 150}, t) == 1);
    CHECK(edge_oracle({50, 150}, {250, 150}, t) == 2);
    CHECK(edge_oracle({50, 150}, {150, 150}, t) == 1);
  }

  TEST_CASE("wall crossings match the per-edge oracle and are symmetric") {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
      Topology t = bare_topology({make_cell("A", 1.8e9, 4, {10, 10})});
      const int nb = 1 + static_cast<int>(rng.index(6));
      for (int k = 0; k < nb; ++k) t.buildings.push_back(random_quad(rng));
      for (int s = 0; s < 20; ++s) {
        const Point a{rng.uniform(0, 1000), rng.uniform(0, 1000)};
        const Point b{rng.uniform(0, 1000), rng.uniform(0, 1000)};
        const int w = wall_crossings(a, b, t);
        REQUIRE(w == edge_oracle(a, b, t));
        REQUIRE(w == wall_crossings(b, a, t));
      }
    }
  }

  TEST_CASE("placement on a single street lies on it") {
    Topology t = bare_topology({make_cell("A", 1.8e9, 4, {10, 10})});
    t.streets.push_back({{100, 300}, {700, 300}});
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      const UePlacement p = sample_ue_position(t, rng);
      CHECK_FALSE(p.indoor);
      CHECK(p.position.y == doctest::Approx(300.0));
      CHECK(p.position.x >= 100.0);
      CHECK(p.position.x <= 700.0);
    }
  }

  TEST_CASE("placement is deterministic and follows the zone weight") {
    const Topology t = load_topology(data_dir() / "topologies" / "baseline.topo");
    Rng a(99), b(99);
    for (int i = 0; i < 50; ++i) {
      const auto pa = sample_ue_position(t, a);
      const auto pb = sample_ue_position(t, b);
      CHECK(pa.position == pb.position);
    }
    Rng rng(5);
    int indoor = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const auto p = sample_ue_position(t, rng, 0.5);
      if (p.indoor) {
        ++indoor;
        REQUIRE(point_in_polygon(p.position, t.buildings[p.zone.index]));
      }
    }
    CHECK(std::abs(static_cast<double>(indoor) / n - 0.5) < 0.02);
  }

  TEST_CASE("placement without zones is an error") {
    const Topology t = bare_topology({make_cell("A", 1.8e9, 4, {10, 10})});
    Rng rng(1);
    CHECK_THROWS_AS(sample_ue_position(t, rng), ValidationError);
  }
}

TEST_SUITE("topogen") {
  TEST_CASE("same spec and seed give identical files") {
    const auto spec = topogen_grid(1500, 1200, 3, 3, 2, 0.6, 100);
    CHECK(to_text(generate_topology(spec, 4)) == to_text(generate_topology(spec, 4)));
    CHECK(to_text(generate_topology(spec, 4)) != to_text(generate_topology(spec, 5)));
  }

  TEST_CASE("grid generator cell count") {
    const Topology t = generate_topology(topogen_grid(2000, 2000, 4, 3, 3, 0.5, 150), 1);
    CHECK(t.towers.size() == 4);
    CHECK(t.cells.size() == 36);
    for (const auto& b : t.buildings) CHECK(is_simple_polygon(b));
  }

  TEST_CASE("infeasible specs are rejected") {
    TopoGenSpec s = topogen_preset("small");
    s.width_m = 0.0;
    CHECK_THROWS_AS(generate_topology(s, 1), ValidationError);
    CHECK_THROWS_AS(topogen_preset("nope"), ValidationError);
    CHECK_THROWS_AS(topogen_grid(100, 100, 0, 3, 1, 0.5, 50), ValidationError);
  }

  TEST_CASE("zero density leaves only streets") {
    TopoGenSpec s = topogen_preset("small");
    s.building_density = 0.0;
    const Topology t = generate_topology(s, 1);
    CHECK(t.buildings.empty());
    CHECK_FALSE(t.streets.empty());
  }
}
