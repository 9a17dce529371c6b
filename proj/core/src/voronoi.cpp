#include "polydg/error.hpp"
#include "polydg/mesh.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace polydg {

namespace {

using Polygon = std::vector<Vec2>;

// Keeps the part of `poly` with (x - p0)·n <= 0.
Polygon clip_half_plane(const Polygon& poly, const Vec2& p0, const Vec2& n) {
  Polygon out;
  const std::size_t m = poly.size();
  out.reserve(m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    const double da = (a - p0).dot(n);
    const double db = (b - p0).dot(n);
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) out.push_back(a + (da / (da - db)) * (b - a));
  }
  return out;
}

Polygon voronoi_cell(const RegionBox& box, const std::vector<Vec2>& seeds, std::size_t i,
                     std::vector<std::pair<double, std::size_t>>& order) {
  Polygon poly{{box.xmin, box.ymin}, {box.xmax, box.ymin}, {box.xmax, box.ymax}, {box.xmin, box.ymax}};
  const Vec2 s = seeds[i];
  order.clear();
  for (std::size_t j = 0; j < seeds.size(); ++j)
    if (j != i) order.emplace_back((seeds[j] - s).squaredNorm(), j);
  std::sort(order.begin(), order.end());
  for (const auto& [d2, j] : order) {
    double r2 = 0.0;
    for (const auto& v : poly) r2 = std::max(r2, (v - s).squaredNorm());
    if (d2 > 4.0 * r2) break;
    const Vec2 n = seeds[j] - s;
    poly = clip_half_plane(poly, 0.5 * (s + seeds[j]), n);
    if (poly.size() < 3) break;
  }
  return poly;
}

std::vector<Polygon> voronoi_box(const RegionBox& box, int n_seeds, int lloyd_iters, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(box.xmin, box.xmax), uy(box.ymin, box.ymax);
  std::vector<Vec2> seeds(static_cast<std::size_t>(n_seeds));
  for (auto& s : seeds) {
    const double x = ux(rng);
    s = Vec2(x, uy(rng));
  }
  std::vector<std::pair<double, std::size_t>> order;
  std::vector<Polygon> cells(seeds.size());
  for (int it = 0;; ++it) {
    for (std::size_t i = 0; i < seeds.size(); ++i) cells[i] = voronoi_cell(box, seeds, i, order);
    if (it == lloyd_iters) break;
    for (std::size_t i = 0; i < seeds.size(); ++i)
      if (cells[i].size() >= 3) seeds[i] = polygon_centroid(cells[i]);
  }
  return cells;
}

}  // namespace

PolyMesh generate_voronoi(std::span<const RegionBox> boxes, int n_seeds, int lloyd_iters, std::uint64_t rng_seed) {
  POLYDG_THROW_IF(n_seeds < 1, InvalidArgument, "n_seeds must be >= 1");
  POLYDG_THROW_IF(lloyd_iters < 0, InvalidArgument, "lloyd_iters must be >= 0");
  POLYDG_THROW_IF(boxes.empty() || boxes.size() > 2, GeometryError, "expected one or two region boxes");
  if (boxes.size() == 2) {
    // Reuse the abutment check of the Cartesian generator on a trivial grid.
    (void)generate_cartesian(boxes, 1, 1);
  }
  std::vector<Vec2> raw;
  std::vector<CellSpec> specs;
  double scale = 0.0;
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const auto& box = boxes[b];
    scale = std::max({scale, box.xmax - box.xmin, box.ymax - box.ymin});
    std::mt19937_64 rng(rng_seed + 0x9E3779B97F4A7C15ULL * b);
    for (auto& poly : voronoi_box(box, n_seeds, lloyd_iters, rng)) {
      POLYDG_THROW_IF(poly.size() < 3, GeometryError, "degenerate Voronoi cell (coincident seeds)");
      CellSpec spec;
      spec.region = box.region;
      for (const auto& v : poly) {
        spec.vertices.push_back(static_cast<int>(raw.size()));
        raw.push_back(v);
      }
      specs.push_back(std::move(spec));
    }
  }
  auto welded = weld_points(raw, 1e-10 * scale);
  for (auto& spec : specs) {
    std::vector<int> vs;
    for (int v : spec.vertices) {
      const int w = welded.index[static_cast<std::size_t>(v)];
      if (vs.empty() || vs.back() != w) vs.push_back(w);
    }
    while (vs.size() > 1 && vs.front() == vs.back()) vs.pop_back();
    POLYDG_THROW_IF(vs.size() < 3, GeometryError, "Voronoi cell collapsed after vertex welding");
    spec.vertices = std::move(vs);
  }
  return PolyMesh::build(std::move(welded.points), std::move(specs), box_classifier({boxes.begin(), boxes.end()}));
}

}  // namespace polydg
