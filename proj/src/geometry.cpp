#include "sentry/geometry.hpp"

namespace sentry {

bool is_convex_ccw(const ConvexPolygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Position& a = v[i];
    const Position& b = v[(i + 1) % n];
    const Position& c = v[(i + 2) % n];
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (cross < 0.0) return false;  // right turn: not CCW-convex
  }
  return true;
}

void validate(const Zone& zone) {
  if (const auto* c = std::get_if<Circle>(&zone)) {
    if (!(c->radius > 0.0)) throw std::invalid_argument("zone: circle radius must be > 0");
    if (!std::isfinite(c->center.x) || !std::isfinite(c->center.y))
      throw std::invalid_argument("zone: circle center must be finite");
    return;
  }
  const auto& poly = std::get<ConvexPolygon>(zone);
  if (poly.vertices.size() < 3) throw std::invalid_argument("zone: polygon needs >= 3 vertices");
  for (const auto& p : poly.vertices)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw std::invalid_argument("zone: polygon vertices must be finite");
  if (!is_convex_ccw(poly)) throw std::invalid_argument("zone: polygon must be convex, CCW");
}

bool contains(const Zone& zone, const Position& p) {
  if (const auto* c = std::get_if<Circle>(&zone)) {
    return distance(c->center, p) <= c->radius;
  }
  const auto& v = std::get<ConvexPolygon>(zone).vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Position& a = v[i];
    const Position& b = v[(i + 1) % n];
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross < 0.0) return false;  // strictly right of an edge
  }
  return true;
}

}  // namespace sentry
