// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellpilot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace cellpilot {

namespace {

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Orientation with a tolerance scaled to the magnitudes involved, so that
// points produced by arithmetic on the segment itself still register as
// collinear.
int orient(Point o, Point a, Point b) {
  const double c = cross(o, a, b);
  const double scale = std::max({std::abs(a.x - o.x), std::abs(a.y - o.y), 1.0}) *
                       std::max({std::abs(b.x - o.x), std::abs(b.y - o.y), 1.0});
  const double eps = 1e-12 * scale;
  if (c > eps) return 1;
  if (c < -eps) return -1;
  return 0;
}

// Parameter of the projection of p onto segment (a, b).
double project_t(Point a, Point b, Point p) {
  const Point d = b - a;
  const double len2 = d.x * d.x + d.y * d.y;
  if (len2 == 0.0) return 0.0;
  return ((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len2;
}

bool on_closed_segment(Point a, Point b, Point p) {
  if (orient(a, b, p) != 0) return false;
  const double t = project_t(a, b, p);
  return t >= 0.0 && t <= 1.0;
}

bool segments_touch(Point a, Point b, Point c, Point d) {
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  return on_closed_segment(a, b, c) || on_closed_segment(a, b, d) ||
         on_closed_segment(c, d, a) || on_closed_segment(c, d, b);
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

double bearing_deg(Point from, Point to) {
  const double deg = std::atan2(to.x - from.x, to.y - from.y) * 180.0 / std::numbers::pi;
  return deg < 0.0 ? deg + 360.0 : deg;
}

double angular_offset_deg(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

double polygon_area(std::span<const Point> poly) {
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point p = poly[i];
    const Point q = poly[(i + 1) % poly.size()];
    acc += p.x * q.y - q.x * p.y;
  }
  return std::abs(acc) * 0.5;
}

Rect bounding_box(std::span<const Point> pts) {
  Rect r{pts.front().x, pts.front().y, pts.front().x, pts.front().y};
  for (Point p : pts) {
    r.min_x = std::min(r.min_x, p.x);
    r.min_y = std::min(r.min_y, p.y);
    r.max_x = std::max(r.max_x, p.x);
    r.max_y = std::max(r.max_y, p.y);
  }
  return r;
}

bool point_in_polygon(Point p, std::span<const Point> poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point a = poly[i];
    const Point b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

bool is_simple_polygon(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  if (polygon_area(poly) <= 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (poly[i] == poly[(i + 1) % n]) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = poly[j];
      const Point d = poly[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges may only share their common vertex; a fold-back
        // (collinear overlap) is a self-intersection.
        const Point shared = (j == i + 1) ? b : a;
        const Point other_ab = (j == i + 1) ? a : b;
        const Point other_cd = (j == i + 1) ? d : c;
        if (orient(shared, other_ab, other_cd) == 0 &&
            project_t(shared, other_ab, other_cd) > 0.0) {
          return false;
        }
        continue;
      }
      if (segments_touch(a, b, c, d)) return false;
    }
  }
  return true;
}

double polyline_length(std::span<const Point> line) {
  double len = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) len += distance(line[i - 1], line[i]);
  return len;
}

Point point_along(std::span<const Point> line, double s) {
  if (line.size() == 1 || s <= 0.0) return line.front();
  for (std::size_t i = 1; i < line.size(); ++i) {
    const double seg = distance(line[i - 1], line[i]);
    if (s <= seg) {
      const double t = seg > 0.0 ? s / seg : 0.0;
      return line[i - 1] + t * (line[i] - line[i - 1]);
    }
    s -= seg;
  }
  return line.back();
}

double distance_to_polyline(Point p, std::span<const Point> line) {
  if (line.size() == 1) return distance(p, line.front());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < line.size(); ++i) {
    const double t = std::clamp(project_t(line[i - 1], line[i], p), 0.0, 1.0);
    const Point q = line[i - 1] + t * (line[i] - line[i - 1]);
    best = std::min(best, distance(p, q));
  }
  return best;
}

int segment_polygon_crossings(Point a, Point b, std::span<const Point> poly) {
  // Fixed endpoint order makes the count exactly symmetric in (a, b).
  if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);
  int count = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point v = poly[i];
    if (orient(a, b, v) == 0) {
      const double t = project_t(a, b, v);
      if (t > 0.0 && t < 1.0) ++count;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = poly[i];
    const Point q = poly[(i + 1) % n];
    const int o1 = orient(a, b, p);
    const int o2 = orient(a, b, q);
    const int o3 = orient(p, q, a);
    const int o4 = orient(p, q, b);
    if (o1 * o2 < 0 && o3 * o4 < 0) ++count;
  }
  return count;
}

}  // namespace cellpilot
