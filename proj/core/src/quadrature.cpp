#include "polydg/quadrature.hpp"

#include "polydg/error.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cmath>
#include <numeric>

namespace polydg {

double QuadratureRule::weight_sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& nodes, std::vector<double>& weights) {
  POLYDG_THROW_IF(n < 1, InvalidArgument, "quadrature needs at least one point");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    J(k, k) = (k == 0 && std::abs(ab) < 1e-300) ? (beta - alpha) / (ab + 2.0)
                                                 : (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double j = k + 1.0;
      const double sj = 2.0 * j + ab;
      const double num = 4.0 * j * (j + alpha) * (j + beta) * (j + ab);
      const double den = sj * sj * (sj + 1.0) * (sj - 1.0);
      J(k, k + 1) = J(k + 1, k) = std::sqrt(num / den);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                     std::tgamma(ab + 2.0);
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    nodes[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    weights[static_cast<std::size_t>(k)] = mu0 * v * v;
  }
}

namespace {

void check_exactness(int exactness) {
  POLYDG_THROW_IF(exactness < 0 || exactness > kMaxQuadratureExactness, InvalidArgument,
                  fmt::format("unsupported quadrature exactness {} (supported: 0..{})", exactness,
                              kMaxQuadratureExactness));
}

int points_for(int exactness) { return std::max(1, (exactness + 2) / 2); }

}  // namespace

QuadratureRule segment_gauss(const Vec2& a, const Vec2& b, int npoints) {
  const double len = (b - a).norm();
  POLYDG_THROW_IF(!(len > 0.0), GeometryError, "zero-length face");
  std::vector<double> x, w;
  gauss_jacobi(npoints, 0.0, 0.0, x, w);
  QuadratureRule r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.points.push_back(a + 0.5 * (x[i] + 1.0) * (b - a));
    r.weights.push_back(0.5 * len * w[i]);
  }
  return r;
}

QuadratureRule face_quadrature(const Vec2& a, const Vec2& b, int exactness) {
  check_exactness(exactness);
  return segment_gauss(a, b, points_for(exactness));
}

QuadratureRule triangle_quadrature(const Vec2& a, const Vec2& b, const Vec2& c, int exactness) {
  check_exactness(exactness);
  const int n = points_for(exactness);
  std::vector<double> xj, wj, xl, wl;
  gauss_jacobi(n, 0.0, 1.0, xj, wj);  // weight (1+x): the collapsed-coordinate Jacobian
  gauss_jacobi(n, 0.0, 0.0, xl, wl);
  const double area2 = std::abs(cross2(b - a, c - a));
  QuadratureRule r;
  r.points.reserve(static_cast<std::size_t>(n * n));
  r.weights.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    const double xi = 0.5 * (xj[static_cast<std::size_t>(i)] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double eta = 0.5 * (xl[static_cast<std::size_t>(j)] + 1.0);
      r.points.push_back(a + xi * ((1.0 - eta) * (b - a) + eta * (c - a)));
      // d(area) = area2 * xi dxi deta; the Jacobi weight carries (1+x) = 2 xi.
      r.weights.push_back(area2 * 0.125 * wj[static_cast<std::size_t>(i)] * wl[static_cast<std::size_t>(j)]);
    }
  }
  return r;
}

QuadratureRule cell_quadrature(std::span<const Vec2> polygon, const Vec2& center, int exactness) {
  check_exactness(exactness);
  POLYDG_THROW_IF(!polygon_is_star_shaped(polygon, center), GeometryError,
                  "cell is not star-shaped with respect to the fan center");
  QuadratureRule r;
  const std::size_t n = polygon.size();
  for (std::size_t k = 0; k < n; ++k) {
    auto t = triangle_quadrature(center, polygon[k], polygon[(k + 1) % n], exactness);
    r.points.insert(r.points.end(), t.points.begin(), t.points.end());
    r.weights.insert(r.weights.end(), t.weights.begin(), t.weights.end());
  }
  return r;
}

}  // namespace polydg
