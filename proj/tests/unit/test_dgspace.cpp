#include "polydg/dg_space.hpp"
#include "polydg/error.hpp"
#include "polydg/manufactured.hpp"
#include "polydg/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace polydg;

namespace {

double integrate(const QuadratureRule& q, const std::function<double(const Vec2&)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * f(q.points[i]);
  return s;
}

const std::vector<Vec2> kSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};

// exact integral of x^a y^b over a triangle: Grundmann-Moeller free closed form via barycentric expansion
double monomial_triangle(const Vec2& p0, const Vec2& p1, const Vec2& p2, int a, int b) {
  // expand (x0 l0 + x1 l1 + x2 l2)^a (y0 l0 + y1 l1 + y2 l2)^b and use int l0^i l1^j l2^k = 2|T| i! j! k! / (i+j+k+2)!
  auto fact = [](int n) { double r = 1; for (int i = 2; i <= n; ++i) r *= i; return r; };
  const double area = 0.5 * std::abs(cross2(p1 - p0, p2 - p0));
  double sum = 0.0;
  for (int i0 = 0; i0 <= a; ++i0)
    for (int i1 = 0; i0 + i1 <= a; ++i1) {
      const int i2 = a - i0 - i1;
      const double cx = fact(a) / (fact(i0) * fact(i1) * fact(i2)) * std::pow(p0.x(), i0) * std::pow(p1.x(), i1) *
                        std::pow(p2.x(), i2);
      for (int j0 = 0; j0 <= b; ++j0)
        for (int j1 = 0; j0 + j1 <= b; ++j1) {
          const int j2 = b - j0 - j1;
          const double cy = fact(b) / (fact(j0) * fact(j1) * fact(j2)) * std::pow(p0.y(), j0) * std::pow(p1.y(), j1) *
                            std::pow(p2.y(), j2);
          const int k0 = i0 + j0, k1 = i1 + j1, k2 = i2 + j2;
          sum += cx * cy * 2.0 * area * fact(k0) * fact(k1) * fact(k2) / fact(k0 + k1 + k2 + 2);
        }
    }
  return sum;
}

std::vector<Vec2> random_star_polygon(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> r(0.4, 1.0), jitter(-0.2, 0.2), shift(-2.0, 2.0);
  const Vec2 c(shift(rng), shift(rng));
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * std::numbers::pi * (i + 0.5 + jitter(rng)) / n;
    const double rad = r(rng);
    pts.push_back(c + rad * Vec2(std::cos(th), std::sin(th)));
  }
  return pts;
}

}  // namespace

TEST(Quadrature, UnitSquareConstant) {
  const auto q = cell_quadrature(kSquare, Vec2(0.5, 0.5), 2);
  EXPECT_NEAR(integrate(q, [](const Vec2&) { return 1.0; }), 1.0, 1e-14);
  for (double w : q.weights) EXPECT_GT(w, 0.0);
}

TEST(Quadrature, UnitSquareX2Y2) {
  const auto q = cell_quadrature(kSquare, Vec2(0.5, 0.5), 4);
  EXPECT_NEAR(integrate(q, [](const Vec2& x) { return x.x() * x.x() * x.y() * x.y(); }), 1.0 / 9.0, 1e-14);
}

TEST(Quadrature, RegularPentagonArea) {
  std::vector<Vec2> pts;
  for (int i = 0; i < 5; ++i) {
    const double th = 2.0 * std::numbers::pi * i / 5.0;
    pts.emplace_back(std::cos(th), std::sin(th));
  }
  const auto q = cell_quadrature(pts, polygon_centroid(pts), 1);
  EXPECT_NEAR(q.weight_sum(), 2.5 * std::sin(2.0 * std::numbers::pi / 5.0), 1e-14);
}

TEST(Quadrature, FaceRules) {
  const auto q = face_quadrature(Vec2(0, 0), Vec2(2, 0), 1);
  EXPECT_NEAR(q.weight_sum(), 2.0, 1e-15);
  const auto g = segment_gauss(Vec2(0, 0), Vec2(1, 0), 2);
  EXPECT_NEAR(integrate(g, [](const Vec2& x) { return std::pow(x.x(), 3); }), 0.25, 1e-15);
  EXPECT_THROW(face_quadrature(Vec2(1, 1), Vec2(1, 1), 2), Error);
}

TEST(Quadrature, ExactnessTooHigh) {
  EXPECT_THROW(cell_quadrature(kSquare, Vec2(0.5, 0.5), kMaxQuadratureExactness + 1), Error);
}

TEST(Quadrature, RandomPolynomialsOnRandomPolygons) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 8; ++trial) {
    const auto pts = random_star_polygon(rng, 4 + trial % 5);
    const Vec2 c = polygon_centroid(pts);
    ASSERT_TRUE(polygon_is_star_shaped(pts, c));
    const int deg = 2 + trial;
    const auto q = cell_quadrature(pts, c, deg);
    EXPECT_NEAR(q.weight_sum(), polygon_signed_area(pts), 1e-12 * std::abs(polygon_signed_area(pts)));
    for (int a = 0; a <= deg; ++a) {
      const int b = deg - a;
      double exact = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) exact += monomial_triangle(c, pts[i], pts[(i + 1) % pts.size()], a, b);
      const double num = integrate(q, [&](const Vec2& x) { return std::pow(x.x(), a) * std::pow(x.y(), b); });
      EXPECT_NEAR(num, exact, 1e-12 * std::max(1.0, std::abs(exact))) << "x^" << a << " y^" << b;
    }
  }
}

TEST(DgSpace, DimensionsAndOffsets) {
  auto mesh = std::make_shared<PolyMesh>(generate_cartesian(verification_boxes(), 2, 2));
  const DgSpace s(mesh, 2, 3);
  EXPECT_EQ(s.dim(Region::Poro), 6);
  EXPECT_EQ(s.dim(Region::Fluid), 10);
  EXPECT_EQ(s.dim_r(), 6);
  const int np = 4, nf = 4;
  EXPECT_EQ(s.size(Field::U), np * 2 * 6);
  EXPECT_EQ(s.size(Field::S), nf * 4 * 10);
  EXPECT_EQ(s.size(Field::R), nf * 6);
  int expect = 0;
  for (Field f : kAllFields) {
    EXPECT_EQ(s.offset(f), expect);
    expect += s.size(f);
  }
  EXPECT_EQ(s.ndof(), expect);
}

TEST(DgSpace, GramIsIdentityAndConstantMode) {
  auto mesh = std::make_shared<PolyMesh>(generate_voronoi(verification_boxes(), 12, 3, 5));
  const DgSpace s(mesh, 3, 2);
  for (int c = 0; c < mesh->num_cells(); ++c) {
    const auto& tab = s.cell_table(c);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(tab.rule.weights.data(), static_cast<Eigen::Index>(tab.rule.size()));
    const Eigen::MatrixXd G = tab.phi.transpose() * w.asDiagonal() * tab.phi;
    EXPECT_LT((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff(), 1e-10);
    const double c0 = 1.0 / std::sqrt(mesh->cell(c).area);
    for (Eigen::Index q = 0; q < tab.phi.rows(); ++q) {
      EXPECT_NEAR(std::abs(tab.phi(q, 0)), c0, 1e-10);
      EXPECT_NEAR(tab.dx(q, 0), 0.0, 1e-10);
      EXPECT_NEAR(tab.dy(q, 0), 0.0, 1e-10);
    }
  }
}

TEST(DgSpace, GradientsMatchFiniteDifferences) {
  auto mesh = std::make_shared<PolyMesh>(generate_voronoi(verification_boxes(), 6, 2, 9));
  const DgSpace s(mesh, 3, 3);
  const double h = 1e-6;
  for (int c = 0; c < mesh->num_cells(); ++c) {
    const auto& B = s.basis(c);
    const Vec2 x = mesh->cell(c).centroid;
    Eigen::VectorXd v;
    Eigen::MatrixX2d g;
    B.eval(x, v, g);
    const Eigen::VectorXd gx = (B.eval(x + Vec2(h, 0)) - B.eval(x - Vec2(h, 0))) / (2 * h);
    const Eigen::VectorXd gy = (B.eval(x + Vec2(0, h)) - B.eval(x - Vec2(0, h))) / (2 * h);
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    EXPECT_LT((gx - g.col(0)).cwiseAbs().maxCoeff(), 1e-6 * scale);
    EXPECT_LT((gy - g.col(1)).cwiseAbs().maxCoeff(), 1e-6 * scale);
  }
}

TEST(Jumps, ScalarDefinitions) {
  const auto j = jump_average(1.0, 0.0, Vec2(1, 0));
  EXPECT_NEAR(j.jump.x(), 1.0, 0);
  EXPECT_NEAR(j.jump.y(), 0.0, 0);
  EXPECT_NEAR(j.average, 0.5, 0);
  const auto same = jump_average(3.0, 3.0, Vec2(0.6, 0.8));
  EXPECT_LT(same.jump.norm(), 1e-15);
  EXPECT_NEAR(same.average, 3.0, 0);
}

TEST(Jumps, VectorDefinitions) {
  const auto b = jump_average(Vec2(2, 0), std::nullopt, Vec2(0, 1));
  Mat2 expect;
  expect << 0, 2, 0, 0;
  EXPECT_LT((b.jump - expect).norm(), 1e-15);
  EXPECT_NEAR(b.normal_jump, 0.0, 0);
  const Vec2 c(1.5, -2.0);
  const auto i = jump_average(c, c, Vec2(0.6, 0.8));
  EXPECT_LT(i.jump.norm(), 1e-15);
  EXPECT_LT((i.average - c).norm(), 1e-15);
  EXPECT_NEAR(i.normal_jump, 0.0, 1e-15);
}

TEST(Jumps, ContinuousFieldHasNoJump) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    Mat2 t;
    t << n(rng), n(rng), n(rng), n(rng);
    const Vec2 nn = Vec2(n(rng), n(rng)).normalized();
    EXPECT_LT(jump_average(t, t, nn).jump.norm(), 1e-13);
    const Vec2 v(n(rng), n(rng));
    EXPECT_LT(jump_average(v, v, nn).jump.norm(), 1e-13);
  }
}

TEST(TensorOps, Examples) {
  Mat2 a;
  a << 2, 0, 0, 0;
  Mat2 da;
  da << 1, 0, 0, -1;
  EXPECT_LT((dev(a) - da).norm(), 1e-15);
  EXPECT_EQ(tr(a), 2.0);
  EXPECT_EQ(skew2(a), 0.0);
  Mat2 r;
  r << 0, 1, -1, 0;
  EXPECT_LT((dev(r) - r).norm(), 1e-15);
  EXPECT_EQ(skew2(r), 1.0);
  const Mat2 I = Mat2::Identity();
  EXPECT_LT(dev(I).norm(), 1e-15);
  EXPECT_EQ(tr(I), 2.0);
}

TEST(TensorOps, Properties) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    Mat2 t;
    t << n(rng), n(rng), n(rng), n(rng);
    EXPECT_LT((dev(dev(t)) - dev(t)).norm(), 1e-14);
    EXPECT_NEAR(tr(dev(t)), 0.0, 1e-14);
    const Mat2 sym = 0.5 * (t + t.transpose());
    EXPECT_LT((sym - dev(sym) - 0.5 * tr(t) * Mat2::Identity()).norm(), 1e-14);
  }
}
