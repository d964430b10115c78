#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

namespace sentry {

// Planar position in meters, x east / y north.
struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator==(const Position& a, const Position& b) { return a.x == b.x && a.y == b.y; }

inline double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct Circle {
  Position center;
  double radius = 0.0;
};

// Vertices counter-clockwise; must be convex.
struct ConvexPolygon {
  std::vector<Position> vertices;
};

using Zone = std::variant<Circle, ConvexPolygon>;

bool is_convex_ccw(const ConvexPolygon& poly);

// Throws std::invalid_argument when the zone invariants do not hold.
void validate(const Zone& zone);

// Boundary inclusive.
bool contains(const Zone& zone, const Position& p);

}  // namespace sentry
