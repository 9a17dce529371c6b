#pragma once

#include <Eigen/Dense>

#include <span>

namespace polydg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Signed area (positive for counter-clockwise loops).
double polygon_signed_area(std::span<const Vec2> pts);

/// Area centroid of a simple polygon with nonzero area.
Vec2 polygon_centroid(std::span<const Vec2> pts);

/// Largest distance between two vertices.
double polygon_diameter(std::span<const Vec2> pts);

/// True when no two non-adjacent edges intersect.
bool polygon_is_simple(std::span<const Vec2> pts);

/// Every fan triangle (center, v_i, v_{i+1}) has positive area, relative to `rel_tol` times the polygon area.
bool polygon_is_star_shaped(std::span<const Vec2> pts, const Vec2& center, double rel_tol = 1e-12);

/// Closed segments [a0,a1] and [b0,b1] intersect.
bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);

/// Rotate by -pi/2: the interface tangent obtained from n_p.
inline Vec2 rotate_minus_90(const Vec2& n) { return Vec2(n.y(), -n.x()); }

}  // namespace polydg
