// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_GEOMETRY_HPP_
#define CELLPILOT_GEOMETRY_HPP_

#include <span>
#include <vector>

namespace cellpilot {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

double distance(Point a, Point b);

/// Compass bearing from `from` to `to` in degrees, [0, 360). 0 is +y (north),
/// 90 is +x (east).
double bearing_deg(Point from, Point to);

/// Smallest absolute difference between two angles, in [0, 180].
double angular_offset_deg(double a, double b);

struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() * height(); }
  bool contains(Point p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

using Polygon = std::vector<Point>;
using Polyline = std::vector<Point>;

double polygon_area(std::span<const Point> poly);
Rect bounding_box(std::span<const Point> pts);

/// Even-odd point-in-polygon test. Boundary points may go either way.
bool point_in_polygon(Point p, std::span<const Point> poly);

/// True when no two non-adjacent edges touch and adjacent edges meet only at
/// their shared vertex.
bool is_simple_polygon(std::span<const Point> poly);

double polyline_length(std::span<const Point> line);

/// Point at arc length `s` along the polyline; `s` is clamped to the ends.
Point point_along(std::span<const Point> line, double s);

/// Distance from `p` to the closest point of the polyline.
double distance_to_polyline(Point p, std::span<const Point> line);

/// Counts how many walls of `poly` the open segment (a, b) passes through.
/// An edge crossed in its interior counts once; a vertex lying strictly inside
/// the segment counts once for the two edges sharing it. Collinear overlap
/// along an edge contributes only through the vertices it touches.
int segment_polygon_crossings(Point a, Point b, std::span<const Point> poly);

}  // namespace cellpilot

#endif  // CELLPILOT_GEOMETRY_HPP_
