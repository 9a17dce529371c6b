#include "polydg/postproc.hpp"

#include "polydg/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <numeric>

namespace polydg {

Eigen::VectorXd CellField::eval(const DgSpace& space, int cell, const Vec2& x) const {
  const auto& c = coeff[static_cast<std::size_t>(cell)];
  POLYDG_THROW_IF(c.size() == 0, InvalidArgument, fmt::format("field is not defined on cell {}", cell));
  const Eigen::VectorXd phi = space.basis(cell).eval(x);
  return c.transpose() * phi.head(c.rows());
}

Eigen::VectorXd CellField::mean(const DgSpace& space, int cell) const {
  const auto& tab = space.cell_table(cell);
  const auto& c = coeff[static_cast<std::size_t>(cell)];
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(c.cols());
  double area = 0.0;
  for (std::size_t q = 0; q < tab.rule.size(); ++q) {
    acc += tab.rule.weights[q] * (c.transpose() * tab.phi.row(static_cast<Eigen::Index>(q)).head(c.rows()).transpose());
    area += tab.rule.weights[q];
  }
  return acc / area;
}

namespace {

CellField empty_field(const DgSpace& space, Region r, int comps) {
  CellField f;
  f.components = comps;
  f.region = r;
  f.coeff.resize(static_cast<std::size_t>(space.mesh().num_cells()));
  return f;
}

/// L2 projection of pointwise values (nq x comps) onto the first `modes` basis functions.
Eigen::MatrixXd project(const BasisTable& tab, const Eigen::MatrixXd& values, int modes) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(tab.rule.size()));
  for (std::size_t q = 0; q < tab.rule.size(); ++q) w(static_cast<Eigen::Index>(q)) = tab.rule.weights[q];
  return tab.phi.leftCols(modes).transpose() * w.asDiagonal() * values;
}

}  // namespace

CellField poro_vector_field(const DgSpace& space, Field f, const Eigen::VectorXd& X) {
  CellField out = empty_field(space, Region::Poro, 2);
  const int d = space.dim(Region::Poro);
  for (int K : space.mesh().region_cells(Region::Poro)) {
    const int c0 = space.offset(f) + space.cell_start(f, K);
    Eigen::MatrixXd c(d, 2);
    c.col(0) = X.segment(c0, d);
    c.col(1) = X.segment(c0 + d, d);
    out.coeff[static_cast<std::size_t>(K)] = c;
  }
  return out;
}

CellField stress_field(const DgSpace& space, const Eigen::VectorXd& X) {
  CellField out = empty_field(space, Region::Fluid, 4);
  const int d = space.dim(Region::Fluid);
  for (int K : space.mesh().region_cells(Region::Fluid)) {
    const int c0 = space.offset(Field::S) + space.cell_start(Field::S, K);
    Eigen::MatrixXd c(d, 4);
    for (int k = 0; k < 4; ++k) c.col(k) = X.segment(c0 + k * d, d);
    out.coeff[static_cast<std::size_t>(K)] = c;
  }
  return out;
}

Eigen::VectorXd backward_stress_rate(const DgSpace& space, const SimState& cur, const std::optional<SimState>& prev) {
  POLYDG_THROW_IF(!prev || cur.k == 0, InvalidArgument,
                  "stress rate at the initial step needs an exact rate (no backward difference available)");
  const double dt = cur.t - prev->t;
  POLYDG_THROW_IF(!(dt > 0.0), InvalidArgument, "backward difference needs increasing times");
  const int o = space.offset(Field::S), n = space.size(Field::S);
  return (cur.X.segment(o, n) - prev->X.segment(o, n)) / dt;
}

FluidRecovery recover_fluid(const DgSpace& space, const MaterialModel& mat, const Eigen::VectorXd& X,
                            const Eigen::VectorXd& S_rate, const LoadSources& src, double t) {
  FluidRecovery r{empty_field(space, Region::Fluid, 2), empty_field(space, Region::Fluid, 1)};
  const int d = space.dim(Region::Fluid);
  const int oS = space.offset(Field::S);
  POLYDG_THROW_IF(S_rate.size() != space.size(Field::S), InvalidArgument, "stress rate has the wrong size");
  const bool has_H = src.H || src.h_f;
  for (int K : space.mesh().region_cells(Region::Fluid)) {
    const auto& tab = space.cell_table(K);
    const int c0 = space.cell_start(Field::S, K);
    const auto nq = tab.phi.rows();
    Eigen::MatrixXd vals(nq, 2);
    const double rinv = 1.0 / mat.fluid(K).rho_f;
    for (int i = 0; i < 2; ++i)
      vals.col(i) = rinv * (tab.dx * X.segment(oS + c0 + (2 * i) * d, d) + tab.dy * X.segment(oS + c0 + (2 * i + 1) * d, d));
    if (has_H)
      for (Eigen::Index q = 0; q < nq; ++q) vals.row(q) += src.eval_H(tab.rule.points[static_cast<std::size_t>(q)], t).transpose();
    r.u_f.coeff[static_cast<std::size_t>(K)] = project(tab, vals, d);
    r.p_f.coeff[static_cast<std::size_t>(K)] = -0.5 * (S_rate.segment(c0, d) + S_rate.segment(c0 + 3 * d, d));
  }
  return r;
}

CellField recover_poro_pressure(const DgSpace& space, const MaterialModel& mat, const Eigen::VectorXd& X) {
  CellField out = empty_field(space, Region::Poro, 1);
  const int d = space.dim(Region::Poro);
  const int oU = space.offset(Field::U), oW = space.offset(Field::W);
  for (int K : space.mesh().region_cells(Region::Poro)) {
    const auto& m = mat.poro(K);
    const auto& tab = space.cell_table(K);
    const int c0 = space.cell_start(Field::U, K);
    const Eigen::VectorXd divu = tab.dx * X.segment(oU + c0, d) + tab.dy * X.segment(oU + c0 + d, d);
    const Eigen::VectorXd divw = tab.dx * X.segment(oW + c0, d) + tab.dy * X.segment(oW + c0 + d, d);
    const Eigen::MatrixXd p = -m.m * (m.beta * divu + divw);
    out.coeff[static_cast<std::size_t>(K)] = project(tab, p, d);
  }
  return out;
}

FieldSnapshot make_snapshot(const DgSpace& space, const MaterialModel& mat, const SimState& s,
                            const std::optional<SimState>& prev, const LoadSources& src) {
  FieldSnapshot snap;
  snap.t = s.t;
  snap.fields["u_p"] = poro_vector_field(space, Field::U, s.X);
  snap.fields["w_p"] = poro_vector_field(space, Field::W, s.X);
  snap.fields["v_p"] = poro_vector_field(space, Field::V, s.X);
  snap.fields["z_p"] = poro_vector_field(space, Field::Z, s.X);
  snap.fields["Sigma_f"] = stress_field(space, s.X);
  snap.fields["p_p"] = recover_poro_pressure(space, mat, s.X);
  if (prev && s.k > 0) {
    auto fr = recover_fluid(space, mat, s.X, backward_stress_rate(space, s, prev), src, s.t);
    snap.fields["u_f"] = std::move(fr.u_f);
    snap.fields["p_f"] = std::move(fr.p_f);
  }
  return snap;
}

void export_vtk(const FieldSnapshot& snap, const DgSpace& space, const std::filesystem::path& path) {
  std::ofstream out(path);
  POLYDG_THROW_IF(!out, Error, fmt::format("cannot write '{}'", path.string()));
  const auto& mesh = space.mesh();
  const auto& vs = mesh.vertices();
  std::string s = fmt::format("# vtk DataFile Version 3.0\npolydg t={:.10g}\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS {} double\n",
                              snap.t, vs.size());
  for (const auto& v : vs) s += fmt::format("{:.17g} {:.17g} 0\n", v.x(), v.y());
  std::size_t total = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) total += mesh.cell(c).vertices.size() + 1;
  s += fmt::format("CELLS {} {}\n", mesh.num_cells(), total);
  for (int c = 0; c < mesh.num_cells(); ++c) s += fmt::format("{} {}\n", mesh.cell(c).vertices.size(), fmt::join(mesh.cell(c).vertices, " "));
  s += fmt::format("CELL_TYPES {}\n", mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) s += "7\n";

  s += fmt::format("CELL_DATA {}\nSCALARS region int 1\nLOOKUP_TABLE default\n", mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) s += mesh.cell(c).region == Region::Poro ? "0\n" : "1\n";
  for (const auto& [name, f] : snap.fields) {
    s += fmt::format("SCALARS {} double {}\nLOOKUP_TABLE default\n", name, f.components);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const Eigen::VectorXd m = f.defined_on(c) ? f.mean(space, c) : Eigen::VectorXd::Zero(f.components);
      s += fmt::format("{:.12g}\n", fmt::join(m.data(), m.data() + m.size(), " "));
    }
  }
  if (!snap.fields.empty()) {
    // vertex values: average of the adjacent cells carrying the field
    std::vector<std::vector<int>> vcells(vs.size());
    for (int c = 0; c < mesh.num_cells(); ++c)
      for (int v : mesh.cell(c).vertices) vcells[static_cast<std::size_t>(v)].push_back(c);
    s += fmt::format("POINT_DATA {}\n", vs.size());
    for (const auto& [name, f] : snap.fields) {
      s += fmt::format("SCALARS {} double {}\nLOOKUP_TABLE default\n", name, f.components);
      for (std::size_t v = 0; v < vs.size(); ++v) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.components);
        int n = 0;
        for (int c : vcells[v])
          if (f.defined_on(c)) {
            acc += f.eval(space, c, vs[v]);
            ++n;
          }
        if (n) acc /= n;
        s += fmt::format("{:.12g}\n", fmt::join(acc.data(), acc.data() + acc.size(), " "));
      }
    }
  }
  out << s;
  POLYDG_THROW_IF(!out, Error, fmt::format("failed writing '{}'", path.string()));
}

int locate_cell(const PolyMesh& mesh, const Vec2& x, double tol) {
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto pts = mesh.cell_points(c);
    const double scale = mesh.cell(c).diameter;
    bool inside = true;
    for (std::size_t i = 0; i < pts.size() && inside; ++i) {
      const Vec2& a = pts[i];
      const Vec2& b = pts[(i + 1) % pts.size()];
      // convex and star-shaped cells alike: use the winding test below when the edge test fails
      inside = cross2(b - a, x - a) >= -tol * scale * (b - a).norm();
    }
    if (inside) return c;
    // non-convex cells: crossing-number test
    bool odd = false;
    for (std::size_t i = 0, j = pts.size() - 1; i < pts.size(); j = i++) {
      if ((pts[i].y() > x.y()) != (pts[j].y() > x.y()) &&
          x.x() < (pts[j].x() - pts[i].x()) * (x.y() - pts[i].y()) / (pts[j].y() - pts[i].y()) + pts[i].x())
        odd = !odd;
    }
    if (odd) return c;
  }
  return -1;
}

void export_csv_profiles(const FieldSnapshot& snap, const DgSpace& space, const std::vector<ProfileLine>& lines,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  POLYDG_THROW_IF(!out, Error, fmt::format("cannot write '{}'", path.string()));
  std::string header = "line,s,x,y";
  for (const auto& [name, f] : snap.fields)
    for (int k = 0; k < f.components; ++k) header += fmt::format(",{}_{}", name, k);
  out << header << '\n';
  const auto& mesh = space.mesh();
  for (const auto& line : lines) {
    const int n = std::max(2, line.samples);
    for (int i = 0; i < n; ++i) {
      const double s = static_cast<double>(i) / (n - 1);
      const Vec2 x = line.a + s * (line.b - line.a);
      const int c = locate_cell(mesh, x, 1e-9);
      if (c < 0) continue;
      std::string row = fmt::format("{},{:.10g},{:.10g},{:.10g}", line.name, s * (line.b - line.a).norm(), x.x(), x.y());
      for (const auto& [name, f] : snap.fields) {
        if (f.defined_on(c)) {
          const Eigen::VectorXd v = f.eval(space, c, x);
          for (int k = 0; k < f.components; ++k) row += fmt::format(",{:.12g}", v(k));
        } else {
          for (int k = 0; k < f.components; ++k) row += ",";
        }
      }
      out << row << '\n';
    }
  }
}

InterfaceFlux interface_flux(const DgSpace& space, const MaterialModel& mat, const Eigen::VectorXd& X,
                             const LoadSources& src, double t) {
  InterfaceFlux out;
  const auto& mesh = space.mesh();
  if (!mesh.has_interface()) return out;
  const int dp = space.dim(Region::Poro), df = space.dim(Region::Fluid);
  const int oV = space.offset(Field::V), oZ = space.offset(Field::Z), oS = space.offset(Field::S);
  const double alpha = mat.interface().alpha;
  const bool has_H = src.H || src.h_f;
  const auto seg = build_interface_segmentation(mesh);
  InterfaceFlux raw;
  out.length = seg.length;
  for (const auto& piece : seg.segments) {
    const int fi = piece.face;
    const Face& f = mesh.face(fi);
    const Vec2 n = f.normal;
    const auto& rule = space.face_rule(fi);
    const auto& tp = space.face_table(fi, 0);
    const auto& tf = space.face_table(fi, 1);
    const int cp = space.cell_start(Field::V, f.cells[0]);
    const int cf = oS + space.cell_start(Field::S, f.cells[1]);
    const double rinv = 1.0 / mat.fluid(f.cells[1]).rho_f;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto qi = static_cast<Eigen::Index>(q);
      const Vec2& x = rule.points[q];
      Vec2 rate;
      for (int c = 0; c < 2; ++c)
        rate(c) = tp.phi.row(qi).dot(alpha * X.segment(oV + cp + c * dp, dp) + X.segment(oZ + cp + c * dp, dp));
      Vec2 uf;
      for (int i = 0; i < 2; ++i)
        uf(i) = rinv * (tf.dx.row(qi).dot(X.segment(cf + 2 * i * df, df)) + tf.dy.row(qi).dot(X.segment(cf + (2 * i + 1) * df, df)));
      if (has_H) uf += src.eval_H(x, t);
      const double a = rate.dot(n), b = uf.dot(n);
      raw.s.push_back((x - seg.start).dot(seg.end - seg.start) / seg.length);
      raw.x.push_back(x);
      raw.porous.push_back(a);
      raw.fluid.push_back(b);
      raw.weights.push_back(rule.weights[q]);
    }
  }
  std::vector<std::size_t> order(raw.s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return raw.s[i] < raw.s[j]; });
  for (std::size_t i : order) {
    out.s.push_back(raw.s[i]);
    out.x.push_back(raw.x[i]);
    out.porous.push_back(raw.porous[i]);
    out.fluid.push_back(raw.fluid[i]);
    out.weights.push_back(raw.weights[i]);
  }
  out.mismatch_l2 = out.mismatch_l2_on(-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  return out;
}

double InterfaceFlux::mismatch_l2_on(double s0, double s1) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] >= s0 && s[i] <= s1) acc += weights[i] * (porous[i] - fluid[i]) * (porous[i] - fluid[i]);
  return std::sqrt(acc);
}

void export_interface_csv(const InterfaceFlux& flux, const std::filesystem::path& path) {
  std::ofstream out(path);
  POLYDG_THROW_IF(!out, Error, fmt::format("cannot write '{}'", path.string()));
  out << "s,x,y,porous_flux,fluid_flux\n";
  for (std::size_t i = 0; i < flux.s.size(); ++i)
    out << fmt::format("{:.10g},{:.10g},{:.10g},{:.12g},{:.12g}\n", flux.s[i], flux.x[i].x(), flux.x[i].y(), flux.porous[i], flux.fluid[i]);
}

CheckerboardReport pressure_checkerboard(const DgSpace& space, const CellField& p_p) {
  const auto& mesh = space.mesh();
  std::vector<double> mean(static_cast<std::size_t>(mesh.num_cells()), 0.0);
  CheckerboardReport r;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int K : mesh.region_cells(Region::Poro)) {
    const double m = p_p.mean(space, K)(0);
    mean[static_cast<std::size_t>(K)] = m;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
    r.max_abs = std::max(r.max_abs, std::abs(m));
  }
  r.range = hi >= lo ? hi - lo : 0.0;
  for (const auto& f : mesh.faces())
    if (f.tag == FaceTag::InteriorP)
      r.max_neighbor_jump = std::max(r.max_neighbor_jump, std::abs(mean[static_cast<std::size_t>(f.cells[0])] - mean[static_cast<std::size_t>(f.cells[1])]));
  return r;
}

}  // namespace polydg
