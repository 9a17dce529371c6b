#include "polydg/mesh.hpp"

#include "polydg/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace polydg {

std::string_view to_string(FaceTag tag) {
  switch (tag) {
    case FaceTag::InteriorP: return "interior_p";
    case FaceTag::InteriorF: return "interior_f";
    case FaceTag::Interface: return "interface";
    case FaceTag::DirichletP: return "dirichlet_p";
    case FaceTag::NeumannP: return "neumann_p";
    case FaceTag::DirichletF: return "dirichlet_f";
    case FaceTag::NeumannF: return "neumann_f";
  }
  return "unknown";
}

FaceTag face_tag_from_string(std::string_view s) {
  for (auto t : {FaceTag::InteriorP, FaceTag::InteriorF, FaceTag::Interface, FaceTag::DirichletP,
                 FaceTag::NeumannP, FaceTag::DirichletF, FaceTag::NeumannF})
    if (to_string(t) == s) return t;
  throw ValidationError(fmt::format("unknown face tag '{}'", s));
}

std::string_view to_string(Region r) { return r == Region::Poro ? "p" : "f"; }

Region region_of(FaceTag tag) {
  switch (tag) {
    case FaceTag::InteriorP:
    case FaceTag::DirichletP:
    case FaceTag::NeumannP: return Region::Poro;
    case FaceTag::InteriorF:
    case FaceTag::DirichletF:
    case FaceTag::NeumannF: return Region::Fluid;
    case FaceTag::Interface: break;
  }
  throw InvalidArgument("interface faces belong to both regions");
}

namespace {

bool is_boundary_tag(FaceTag t) {
  return t == FaceTag::DirichletP || t == FaceTag::NeumannP || t == FaceTag::DirichletF ||
         t == FaceTag::NeumannF;
}

struct EdgeRef {
  int cell;
  int local;
  int from;
  int to;
};

struct Piece {
  double s0, s1;  // parameters along the owning edge
  int other;      // index into the unmatched edge list
};

}  // namespace

PolyMesh PolyMesh::build(std::vector<Vec2> vertices, std::vector<CellSpec> specs,
                         const BoundaryClassifier& classify) {
  PolyMesh m;
  m.vertices_ = std::move(vertices);
  const int nv = static_cast<int>(m.vertices_.size());
  POLYDG_THROW_IF(specs.empty(), ValidationError, "mesh has no cells");

  m.cells_.resize(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto& spec = specs[i];
    Cell& c = m.cells_[i];
    POLYDG_THROW_IF(spec.vertices.size() < 3, ValidationError,
                    fmt::format("cell {}: fewer than 3 vertices", i));
    for (int v : spec.vertices)
      POLYDG_THROW_IF(v < 0 || v >= nv, ValidationError,
                      fmt::format("cell {}: vertex index out of range", i));
    for (std::size_t k = 0; k < spec.vertices.size(); ++k)
      POLYDG_THROW_IF(spec.vertices[k] == spec.vertices[(k + 1) % spec.vertices.size()],
                      ValidationError, fmt::format("cell {}: repeated consecutive vertex", i));
    c.vertices = std::move(spec.vertices);
    c.region = spec.region;
    const auto pts = m.cell_points(static_cast<int>(i));
    const double area = polygon_signed_area(pts);
    POLYDG_THROW_IF(!(area > 0.0), ValidationError,
                    fmt::format("cell {}: vertex loop is not counter-clockwise or has zero area", i));
    POLYDG_THROW_IF(!polygon_is_simple(pts), GeometryError,
                    fmt::format("cell {}: polygon is self-intersecting", i));
    c.area = area;
    c.centroid = polygon_centroid(pts);
    c.diameter = polygon_diameter(pts);
    POLYDG_THROW_IF(!polygon_is_star_shaped(pts, c.centroid), GeometryError,
                    fmt::format("cell {}: not star-shaped with respect to its centroid", i));
    auto& list = c.region == Region::Poro ? m.poro_cells_ : m.fluid_cells_;
    c.local_index = static_cast<int>(list.size());
    list.push_back(static_cast<int>(i));
  }

  double scale = 0.0;
  {
    Vec2 lo = m.vertices_[0], hi = m.vertices_[0];
    for (const auto& p : m.vertices_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    scale = (hi - lo).norm();
  }
  const double geo_tol = 1e-10 * std::max(scale, 1e-300);

  // Edge incidence.
  std::map<std::pair<int, int>, std::vector<EdgeRef>> edges;
  for (int ci = 0; ci < m.num_cells(); ++ci) {
    const auto& vs = m.cells_[static_cast<std::size_t>(ci)].vertices;
    for (int k = 0; k < static_cast<int>(vs.size()); ++k) {
      const int a = vs[static_cast<std::size_t>(k)];
      const int b = vs[(static_cast<std::size_t>(k) + 1) % vs.size()];
      edges[{std::min(a, b), std::max(a, b)}].push_back({ci, k, a, b});
    }
  }
  for (const auto& [key, uses] : edges) {
    if (uses.size() > 2 || (uses.size() == 2 && uses[0].from == uses[1].from))
      throw ValidationError(fmt::format("cells {} and {} overlap along edge ({},{})", uses[0].cell,
                                        uses[1].cell, key.first, key.second));
  }

  // Unmatched edges: boundary or interface overlay pieces.
  std::vector<EdgeRef> unmatched;
  std::map<std::pair<int, int>, int> unmatched_index;  // (cell, local) -> index
  for (const auto& [key, uses] : edges) {
    if (uses.size() == 1) {
      unmatched_index[{uses[0].cell, uses[0].local}] = static_cast<int>(unmatched.size());
      unmatched.push_back(uses[0]);
    }
  }
  std::vector<std::vector<Piece>> pieces(unmatched.size());
  for (std::size_t i = 0; i < unmatched.size(); ++i) {
    const Vec2 a = m.vertices_[static_cast<std::size_t>(unmatched[i].from)];
    const Vec2 b = m.vertices_[static_cast<std::size_t>(unmatched[i].to)];
    const double len = (b - a).norm();
    const Vec2 dir = (b - a) / len;
    for (std::size_t j = 0; j < unmatched.size(); ++j) {
      if (i == j) continue;
      const Vec2 c = m.vertices_[static_cast<std::size_t>(unmatched[j].from)];
      const Vec2 d = m.vertices_[static_cast<std::size_t>(unmatched[j].to)];
      if (std::abs(cross2(dir, c - a)) > geo_tol || std::abs(cross2(dir, d - a)) > geo_tol) continue;
      const double sc = dir.dot(c - a);
      const double sd = dir.dot(d - a);
      const double s0 = std::max(0.0, std::min(sc, sd));
      const double s1 = std::min(len, std::max(sc, sd));
      if (s1 - s0 <= geo_tol) continue;
      const Region ri = m.cells_[static_cast<std::size_t>(unmatched[i].cell)].region;
      const Region rj = m.cells_[static_cast<std::size_t>(unmatched[j].cell)].region;
      if (ri == rj)
        throw ValidationError(fmt::format(
            "cells {} and {}: non-conforming edges inside region {} (hanging nodes are only "
            "supported on the interface)",
            unmatched[i].cell, unmatched[j].cell, to_string(ri)));
      pieces[i].push_back({s0, s1, static_cast<int>(j)});
    }
    auto& pc = pieces[i];
    std::sort(pc.begin(), pc.end(), [](const Piece& x, const Piece& y) { return x.s0 < y.s0; });
    if (pc.empty()) continue;
    double covered = 0.0;
    for (const auto& p : pc) covered += p.s1 - p.s0;
    bool gap = std::abs(pc.front().s0) > geo_tol || std::abs(pc.back().s1 - len) > geo_tol;
    for (std::size_t k = 1; k < pc.size(); ++k) gap = gap || std::abs(pc[k].s0 - pc[k - 1].s1) > geo_tol;
    if (gap || std::abs(covered - len) > geo_tol)
      throw GeometryError(fmt::format(
          "interface traces disagree: edge ({},{}) of cell {} is only partially matched by the "
          "other region",
          unmatched[i].from, unmatched[i].to, unmatched[i].cell));
  }

  // Faces, in cell/edge order.
  auto add_face_to_cells = [&m](int fid) {
    const Face& f = m.faces_[static_cast<std::size_t>(fid)];
    for (int c : f.cells)
      if (c >= 0) m.cells_[static_cast<std::size_t>(c)].faces.push_back(fid);
  };
  std::map<std::pair<int, int>, bool> matched_done;
  for (int ci = 0; ci < m.num_cells(); ++ci) {
    const Cell& cell = m.cells_[static_cast<std::size_t>(ci)];
    const auto& vs = cell.vertices;
    for (int k = 0; k < static_cast<int>(vs.size()); ++k) {
      const int va = vs[static_cast<std::size_t>(k)];
      const int vb = vs[(static_cast<std::size_t>(k) + 1) % vs.size()];
      const auto key = std::make_pair(std::min(va, vb), std::max(va, vb));
      const auto& uses = edges[key];
      const Vec2 a = m.vertices_[static_cast<std::size_t>(va)];
      const Vec2 b = m.vertices_[static_cast<std::size_t>(vb)];
      const Vec2 outward = Vec2(b.y() - a.y(), a.x() - b.x()).normalized();
      if (uses.size() == 2) {
        if (matched_done[key]) continue;
        matched_done[key] = true;
        const int other = uses[0].cell == ci ? uses[1].cell : uses[0].cell;
        const Region ro = m.cells_[static_cast<std::size_t>(other)].region;
        Face f;
        f.a = a;
        f.b = b;
        f.vertex_ids = {va, vb};
        f.length = (b - a).norm();
        f.normal = outward;
        f.cells = {ci, other};
        if (ro == cell.region) {
          f.tag = cell.region == Region::Poro ? FaceTag::InteriorP : FaceTag::InteriorF;
        } else {
          f.tag = FaceTag::Interface;
          if (cell.region == Region::Fluid) {
            f.cells = {other, ci};
            f.normal = -outward;
          }
        }
        m.faces_.push_back(f);
        add_face_to_cells(m.num_faces() - 1);
        continue;
      }
      const int ui = unmatched_index.at({ci, k});
      const auto& pc = pieces[static_cast<std::size_t>(ui)];
      if (pc.empty()) {
        Face f;
        f.a = a;
        f.b = b;
        f.vertex_ids = {va, vb};
        f.length = (b - a).norm();
        f.normal = outward;
        f.cells = {ci, -1};
        f.tag = classify(f, cell.region);
        POLYDG_THROW_IF(!is_boundary_tag(f.tag) || region_of(f.tag) != cell.region, ValidationError,
                        fmt::format("face ({},{}) of cell {}: tag '{}' is not a boundary tag of region {}",
                                    va, vb, ci, to_string(f.tag), to_string(cell.region)));
        m.faces_.push_back(f);
        add_face_to_cells(m.num_faces() - 1);
        continue;
      }
      if (cell.region != Region::Poro) continue;  // interface pieces are created from the p side
      const Vec2 dir = (b - a).normalized();
      for (const auto& p : pc) {
        Face f;
        f.a = a + p.s0 * dir;
        f.b = a + p.s1 * dir;
        if (std::abs(p.s0) <= geo_tol) f.a = a;
        if (std::abs(p.s1 - (b - a).norm()) <= geo_tol) f.b = b;
        f.length = (f.b - f.a).norm();
        f.normal = outward;
        f.cells = {ci, unmatched[static_cast<std::size_t>(p.other)].cell};
        f.tag = FaceTag::Interface;
        m.faces_.push_back(f);
        add_face_to_cells(m.num_faces() - 1);
      }
    }
  }

  // Interface: a single straight segment with constant n_p.
  for (const auto& f : m.faces_) {
    if (f.tag != FaceTag::Interface) continue;
    if (!m.has_interface_) {
      m.has_interface_ = true;
      m.interface_normal_ = f.normal;
      continue;
    }
    POLYDG_THROW_IF((f.normal - m.interface_normal_).norm() > 1e-10, GeometryError,
                    "interface is not a straight segment (n_p varies along it)");
  }
  if (m.has_interface_) {
    const Face* first = nullptr;
    for (const auto& f : m.faces_)
      if (f.tag == FaceTag::Interface) {
        if (!first) first = &f;
        POLYDG_THROW_IF(std::abs(m.interface_normal_.dot(f.a - first->a)) > geo_tol, GeometryError,
                        "interface faces are not collinear");
      }
  }
  return m;
}

std::vector<int> PolyMesh::faces_with_tag(FaceTag tag) const {
  std::vector<int> out;
  for (int i = 0; i < num_faces(); ++i)
    if (faces_[static_cast<std::size_t>(i)].tag == tag) out.push_back(i);
  return out;
}

double PolyMesh::region_area(Region r) const {
  double a = 0.0;
  for (int c : region_cells(r)) a += cell(c).area;
  return a;
}

std::vector<Vec2> PolyMesh::cell_points(int c) const {
  std::vector<Vec2> pts;
  for (int v : cells_[static_cast<std::size_t>(c)].vertices) pts.push_back(vertices_[static_cast<std::size_t>(v)]);
  return pts;
}

bool PolyMesh::operator==(const PolyMesh& o) const {
  if (vertices_.size() != o.vertices_.size() || cells_.size() != o.cells_.size() ||
      faces_.size() != o.faces_.size())
    return false;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i].x() != o.vertices_[i].x() || vertices_[i].y() != o.vertices_[i].y()) return false;
  for (std::size_t i = 0; i < cells_.size(); ++i)
    if (cells_[i].vertices != o.cells_[i].vertices || cells_[i].region != o.cells_[i].region) return false;
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    const auto& f = faces_[i];
    const auto& g = o.faces_[i];
    if (f.tag != g.tag || f.cells != g.cells || f.a != g.a || f.b != g.b) return false;
  }
  return true;
}

BoundaryClassifier box_classifier(std::vector<RegionBox> boxes) {
  return [boxes = std::move(boxes)](const Face& f, Region region) -> FaceTag {
    const Vec2 mid = f.midpoint();
    for (const auto& box : boxes) {
      if (box.region != region) continue;
      const double tol = 1e-9 * std::max(box.xmax - box.xmin, box.ymax - box.ymin);
      BoundaryKind kind;
      if (std::abs(mid.x() - box.xmin) <= tol && f.normal.x() < -0.5) kind = box.left;
      else if (std::abs(mid.x() - box.xmax) <= tol && f.normal.x() > 0.5) kind = box.right;
      else if (std::abs(mid.y() - box.ymin) <= tol && f.normal.y() < -0.5) kind = box.bottom;
      else if (std::abs(mid.y() - box.ymax) <= tol && f.normal.y() > 0.5) kind = box.top;
      else continue;
      if (region == Region::Poro)
        return kind == BoundaryKind::Dirichlet ? FaceTag::DirichletP : FaceTag::NeumannP;
      return kind == BoundaryKind::Dirichlet ? FaceTag::DirichletF : FaceTag::NeumannF;
    }
    throw ValidationError(fmt::format("boundary face at ({}, {}) does not lie on a region box side",
                                      mid.x(), mid.y()));
  };
}

WeldResult weld_points(std::span<const Vec2> pts, double tol) {
  const std::size_t n = pts.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& pa = pts[static_cast<std::size_t>(a)];
    const auto& pb = pts[static_cast<std::size_t>(b)];
    return pa.x() < pb.x() || (pa.x() == pb.x() && (pa.y() < pb.y() || (pa.y() == pb.y() && a < b)));
  });
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pi = pts[static_cast<std::size_t>(order[i])];
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& pj = pts[static_cast<std::size_t>(order[j])];
      if (pj.x() - pi.x() > tol) break;
      if ((pj - pi).norm() <= tol) {
        const int a = find(order[i]);
        const int b = find(order[j]);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
    }
  }
  WeldResult out;
  out.index.assign(n, -1);
  std::vector<int> rep_to_new(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const int r = find(static_cast<int>(i));
    if (rep_to_new[static_cast<std::size_t>(r)] < 0) {
      rep_to_new[static_cast<std::size_t>(r)] = static_cast<int>(out.points.size());
      out.points.push_back(pts[static_cast<std::size_t>(r)]);
    }
    out.index[i] = rep_to_new[static_cast<std::size_t>(r)];
  }
  return out;
}

namespace {

void validate_boxes(std::span<const RegionBox> boxes) {
  POLYDG_THROW_IF(boxes.empty() || boxes.size() > 2, GeometryError, "expected one or two region boxes");
  for (const auto& b : boxes)
    POLYDG_THROW_IF(!(b.xmax > b.xmin && b.ymax > b.ymin), GeometryError, "region box has no area");
  if (boxes.size() == 2) {
    const auto& a = boxes[0];
    const auto& b = boxes[1];
    POLYDG_THROW_IF(a.region == b.region, GeometryError, "the two region boxes must belong to different regions");
    const double tol = 1e-12 * std::max({a.xmax - a.xmin, a.ymax - a.ymin, b.xmax - b.xmin, b.ymax - b.ymin});
    auto eq = [tol](double x, double y) { return std::abs(x - y) <= tol; };
    const bool same_y = eq(a.ymin, b.ymin) && eq(a.ymax, b.ymax);
    const bool same_x = eq(a.xmin, b.xmin) && eq(a.xmax, b.xmax);
    const bool abut = (same_y && (eq(a.xmax, b.xmin) || eq(b.xmax, a.xmin))) ||
                      (same_x && (eq(a.ymax, b.ymin) || eq(b.ymax, a.ymin)));
    POLYDG_THROW_IF(!abut, GeometryError, "region boxes do not share a common edge");
  }
}

}  // namespace

PolyMesh generate_cartesian(std::span<const RegionBox> boxes, int nx, int ny, bool triangulate) {
  POLYDG_THROW_IF(nx < 1 || ny < 1, InvalidArgument, "nx and ny must be >= 1");
  validate_boxes(boxes);
  std::vector<Vec2> raw;
  std::vector<CellSpec> cells;
  double scale = 0.0;
  for (const auto& box : boxes) {
    const int bx = box.nx > 0 ? box.nx : nx;
    const int by = box.ny > 0 ? box.ny : ny;
    scale = std::max({scale, box.xmax - box.xmin, box.ymax - box.ymin});
    const int base = static_cast<int>(raw.size());
    for (int j = 0; j <= by; ++j)
      for (int i = 0; i <= bx; ++i) {
        // Exact endpoints on the box sides so welding across the interface is exact.
        const double x = i == bx ? box.xmax : box.xmin + (box.xmax - box.xmin) * i / bx;
        const double y = j == by ? box.ymax : box.ymin + (box.ymax - box.ymin) * j / by;
        raw.emplace_back(x, y);
      }
    auto id = [&](int i, int j) { return base + j * (bx + 1) + i; };
    for (int j = 0; j < by; ++j)
      for (int i = 0; i < bx; ++i) {
        if (triangulate) {
          cells.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, box.region});
          cells.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, box.region});
        } else {
          cells.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}, box.region});
        }
      }
  }
  auto welded = weld_points(raw, 1e-12 * scale);
  for (auto& c : cells)
    for (auto& v : c.vertices) v = welded.index[static_cast<std::size_t>(v)];
  return PolyMesh::build(std::move(welded.points), std::move(cells),
                         box_classifier({boxes.begin(), boxes.end()}));
}

RegularityReport regularity_report(const PolyMesh& mesh) {
  RegularityReport r;
  r.cell_ratio.assign(static_cast<std::size_t>(mesh.num_cells()), 0.0);
  r.neighbor_ratio.assign(static_cast<std::size_t>(mesh.num_faces()), 1.0);
  r.h_min = std::numeric_limits<double>::infinity();
  constexpr double d = 2.0;
  for (int ci = 0; ci < mesh.num_cells(); ++ci) {
    const Cell& c = mesh.cell(ci);
    double worst = 0.0;
    for (int fi : c.faces) {
      const Face& f = mesh.face(fi);
      const double simplex = 0.5 * std::abs(cross2(f.a - c.centroid, f.b - c.centroid));
      worst = std::max(worst, c.diameter * f.length / (d * simplex));
    }
    r.cell_ratio[static_cast<std::size_t>(ci)] = worst;
    if (worst > r.max_cell_ratio) {
      r.max_cell_ratio = worst;
      r.worst_cell = ci;
    }
    r.max_aspect = std::max(r.max_aspect, c.diameter * c.diameter / c.area);
    r.h_max = std::max(r.h_max, c.diameter);
    r.h_min = std::min(r.h_min, c.diameter);
  }
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    if (f.is_boundary()) continue;
    const double h0 = mesh.cell(f.cells[0]).diameter;
    const double h1 = mesh.cell(f.cells[1]).diameter;
    const double ratio = std::max(h0 / h1, h1 / h0);
    r.neighbor_ratio[static_cast<std::size_t>(fi)] = ratio;
    r.max_neighbor_ratio = std::max(r.max_neighbor_ratio, ratio);
  }
  return r;
}

InterfaceSegmentation build_interface_segmentation(const PolyMesh& mesh) {
  POLYDG_THROW_IF(!mesh.has_interface(), InvalidArgument, "mesh has no interface faces");
  const Vec2 t = mesh.interface_tangent();
  const Vec2 n = mesh.interface_normal();
  InterfaceSegmentation seg;

  // Full cell edges lying on the interface, per side.
  struct EdgeOnLine {
    Vec2 a, b;
    double s0, s1;
    int cell;
  };
  std::vector<EdgeOnLine> p_edges, f_edges;
  const auto ifaces = mesh.faces_with_tag(FaceTag::Interface);
  const Vec2 origin = mesh.face(ifaces.front()).a;
  double scale = 0.0;
  for (int fi : ifaces) scale = std::max(scale, mesh.face(fi).length);
  auto collect = [&](int ci, std::vector<EdgeOnLine>& out) {
    const auto pts = mesh.cell_points(ci);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Vec2 a = pts[k];
      const Vec2 b = pts[(k + 1) % pts.size()];
      if (std::abs(n.dot(a - origin)) > 1e-10 * scale || std::abs(n.dot(b - origin)) > 1e-10 * scale)
        continue;
      const double sa = t.dot(a - origin);
      const double sb = t.dot(b - origin);
      out.push_back({a, b, std::min(sa, sb), std::max(sa, sb), ci});
    }
  };
  std::vector<int> seen_p, seen_f;
  for (int fi : ifaces) {
    const Face& f = mesh.face(fi);
    if (std::find(seen_p.begin(), seen_p.end(), f.cells[0]) == seen_p.end()) {
      seen_p.push_back(f.cells[0]);
      collect(f.cells[0], p_edges);
    }
    if (std::find(seen_f.begin(), seen_f.end(), f.cells[1]) == seen_f.end()) {
      seen_f.push_back(f.cells[1]);
      collect(f.cells[1], f_edges);
    }
  }
  auto span_of = [](const std::vector<EdgeOnLine>& es, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (const auto& e : es) {
      lo = std::min(lo, e.s0);
      hi = std::max(hi, e.s1);
    }
  };
  double plo, phi, flo, fhi;
  span_of(p_edges, plo, phi);
  span_of(f_edges, flo, fhi);
  const double tol = 1e-10 * std::max(1.0, phi - plo);
  POLYDG_THROW_IF(std::abs(plo - flo) > tol || std::abs(phi - fhi) > tol, GeometryError,
                  fmt::format("p-trace [{}, {}] and f-trace [{}, {}] of the interface disagree", plo, phi,
                              flo, fhi));

  seg.start = origin + plo * t;
  seg.end = origin + phi * t;
  seg.length = phi - plo;
  for (int fi : ifaces) {
    const Face& f = mesh.face(fi);
    InterfaceSegment s;
    s.face = fi;
    s.p_cell = f.cells[0];
    s.f_cell = f.cells[1];
    double sa = t.dot(f.a - origin) - plo;
    double sb = t.dot(f.b - origin) - plo;
    s.a = sa <= sb ? f.a : f.b;
    s.b = sa <= sb ? f.b : f.a;
    s.s0 = std::min(sa, sb);
    s.s1 = std::max(sa, sb);
    const double mid = 0.5 * (s.s0 + s.s1) + plo;
    bool found_p = false, found_f = false;
    for (const auto& e : p_edges)
      if (e.cell == s.p_cell && e.s0 - tol <= mid && mid <= e.s1 + tol) {
        s.p_edge = {e.a, e.b};
        found_p = true;
        POLYDG_THROW_IF(s.s0 + plo < e.s0 - tol || s.s1 + plo > e.s1 + tol, GeometryError,
                        "interface sub-segment extends beyond its p-side edge");
      }
    for (const auto& e : f_edges)
      if (e.cell == s.f_cell && e.s0 - tol <= mid && mid <= e.s1 + tol) {
        s.f_edge = {e.a, e.b};
        found_f = true;
        POLYDG_THROW_IF(s.s0 + plo < e.s0 - tol || s.s1 + plo > e.s1 + tol, GeometryError,
                        "interface sub-segment extends beyond its f-side edge");
      }
    POLYDG_THROW_IF(!found_p || !found_f, GeometryError,
                    fmt::format("interface face {} is not contained in edges of both adjacent cells", fi));
    seg.segments.push_back(s);
  }
  std::sort(seg.segments.begin(), seg.segments.end(),
            [](const InterfaceSegment& x, const InterfaceSegment& y) { return x.s0 < y.s0; });
  double covered = 0.0;
  for (std::size_t k = 0; k < seg.segments.size(); ++k) {
    covered += seg.segments[k].s1 - seg.segments[k].s0;
    if (k > 0)
      POLYDG_THROW_IF(std::abs(seg.segments[k].s0 - seg.segments[k - 1].s1) > tol, GeometryError,
                      "interface sub-segments leave a gap or overlap");
  }
  POLYDG_THROW_IF(std::abs(covered - seg.length) > 1e-12 * std::max(1.0, seg.length) + tol, GeometryError,
                  "interface sub-segments do not cover the interface");
  return seg;
}

}  // namespace polydg
