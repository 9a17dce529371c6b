#pragma once

#include "polydg/geometry.hpp"

#include <span>
#include <vector>

namespace polydg {

struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double weight_sum() const;
};

/// Largest supported polynomial exactness.
inline constexpr int kMaxQuadratureExactness = 20;

/// Gauss-Jacobi nodes/weights on [-1,1] for the weight (1-x)^alpha (1+x)^beta (Golub-Welsch).
void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& nodes, std::vector<double>& weights);

/// n-point Gauss-Legendre rule mapped to the segment [a,b].
QuadratureRule segment_gauss(const Vec2& a, const Vec2& b, int npoints);

/// Gauss rule on [a,b] exact for polynomials of the given degree.
QuadratureRule face_quadrature(const Vec2& a, const Vec2& b, int exactness);

/// Collapsed (Duffy) Gauss-Jacobi x Gauss-Legendre rule on a triangle.
QuadratureRule triangle_quadrature(const Vec2& a, const Vec2& b, const Vec2& c, int exactness);

/// Centroid-fan sub-triangulation with a triangle rule on each piece.
QuadratureRule cell_quadrature(std::span<const Vec2> polygon, const Vec2& center, int exactness);

}  // namespace polydg
