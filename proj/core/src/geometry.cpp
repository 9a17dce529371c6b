#include "polydg/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace polydg {

double polygon_signed_area(std::span<const Vec2> pts) {
  const std::size_t n = pts.size();
  double a = 0.0;
  for (std::size_t i = 0; i < n; ++i) a += cross2(pts[i], pts[(i + 1) % n]);
  return 0.5 * a;
}

Vec2 polygon_centroid(std::span<const Vec2> pts) {
  const std::size_t n = pts.size();
  // Shift to the first vertex to limit cancellation on far-from-origin cells.
  const Vec2 o = pts[0];
  double a = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = pts[i] - o;
    const Vec2 q = pts[(i + 1) % n] - o;
    const double w = cross2(p, q);
    a += w;
    c += w * (p + q);
  }
  return o + c / (3.0 * a);
}

double polygon_diameter(std::span<const Vec2> pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

namespace {

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross2(b - a, c - a);
  const double scale = (b - a).norm() * (c - a).norm();
  if (std::abs(v) <= 1e-14 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) - 1e-14 <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-14 &&
         std::min(a.y(), b.y()) - 1e-14 <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-14;
}

}  // namespace

bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
  const int o1 = orientation(a0, a1, b0);
  const int o2 = orientation(a0, a1, b1);
  const int o3 = orientation(b0, b1, a0);
  const int o4 = orientation(b0, b1, a1);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a0, a1, b0)) return true;
  if (o2 == 0 && on_segment(a0, a1, b1)) return true;
  if (o3 == 0 && on_segment(b0, b1, a0)) return true;
  if (o4 == 0 && on_segment(b0, b1, a1)) return true;
  return false;
}

bool polygon_is_simple(std::span<const Vec2> pts) {
  const std::size_t n = pts.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool polygon_is_star_shaped(std::span<const Vec2> pts, const Vec2& center, double rel_tol) {
  const double area = std::abs(polygon_signed_area(pts));
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double tri = 0.5 * cross2(pts[i] - center, pts[(i + 1) % n] - center);
    if (tri <= rel_tol * area) return false;
  }
  return true;
}

}  // namespace polydg
