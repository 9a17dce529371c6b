#include "polydg/analysis.hpp"

#include "polydg/error.hpp"
#include "polydg/parallel.hpp"

#include <Eigen/SparseCholesky>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>

namespace polydg {

// ---------------------------------------------------------------- field samplers

VecField discrete_vector(const DgSpace& space, Field f, const Eigen::VectorXd& X) {
  POLYDG_THROW_IF(f != Field::U && f != Field::W && f != Field::V && f != Field::Z, InvalidArgument,
                  "discrete_vector: not a poroelastic vector block");
  Eigen::VectorXd block = X.segment(space.offset(f), space.size(f));
  const int d = space.dim(Region::Poro);
  return [&space, f, block = std::move(block), d](int cell, const BasisTable& tab, VecSample& out) {
    const int c0 = space.cell_start(f, cell);
    const auto n = tab.phi.rows();
    const Eigen::VectorXd a = block.segment(c0, d), b = block.segment(c0 + d, d);
    const Eigen::VectorXd va = tab.phi * a, vb = tab.phi * b, ax = tab.dx * a, ay = tab.dy * a, bx = tab.dx * b, by = tab.dy * b;
    out.val.resize(static_cast<std::size_t>(n));
    out.grad.resize(static_cast<std::size_t>(n));
    for (Eigen::Index q = 0; q < n; ++q) {
      out.val[static_cast<std::size_t>(q)] = Vec2(va(q), vb(q));
      out.grad[static_cast<std::size_t>(q)] << ax(q), ay(q), bx(q), by(q);
    }
  };
}

TenField discrete_tensor(const DgSpace& space, const Eigen::VectorXd& X) {
  Eigen::VectorXd block = X.segment(space.offset(Field::S), space.size(Field::S));
  const int d = space.dim(Region::Fluid);
  return [&space, block = std::move(block), d](int cell, const BasisTable& tab, TenSample& out) {
    const int c0 = space.cell_start(Field::S, cell);
    const auto n = tab.phi.rows();
    out.val.assign(static_cast<std::size_t>(n), Mat2::Zero());
    out.div.assign(static_cast<std::size_t>(n), Vec2::Zero());
    for (int c = 0; c < 4; ++c) {
      const int i = c / 2, j = c % 2;
      const Eigen::VectorXd a = block.segment(c0 + c * d, d);
      const Eigen::VectorXd v = tab.phi * a;
      const Eigen::VectorXd g = (j == 0 ? tab.dx : tab.dy) * a;
      for (Eigen::Index q = 0; q < n; ++q) {
        out.val[static_cast<std::size_t>(q)](i, j) = v(q);
        out.div[static_cast<std::size_t>(q)](i) += g(q);
      }
    }
  };
}

ScalField discrete_rotation(const DgSpace& space, const Eigen::VectorXd& X) {
  Eigen::VectorXd block = X.segment(space.offset(Field::R), space.size(Field::R));
  const int dr = space.dim_r();
  return [&space, block = std::move(block), dr](int cell, const BasisTable& tab, std::vector<double>& out) {
    const Eigen::VectorXd v = tab.phi.leftCols(dr) * block.segment(space.cell_start(Field::R, cell), dr);
    out.assign(v.data(), v.data() + v.size());
  };
}

VecField exact_vector(VectorFn f, TensorFn grad, double t) {
  return [f = std::move(f), grad = std::move(grad), t](int, const BasisTable& tab, VecSample& out) {
    const auto& pts = tab.rule.points;
    out.val.resize(pts.size());
    out.grad.resize(pts.size());
    for (std::size_t q = 0; q < pts.size(); ++q) {
      out.val[q] = f ? f(pts[q], t) : Vec2::Zero();
      out.grad[q] = grad ? grad(pts[q], t) : Mat2::Zero();
    }
  };
}

TenField exact_tensor(TensorFn f, VectorFn div, double t) {
  return [f = std::move(f), div = std::move(div), t](int, const BasisTable& tab, TenSample& out) {
    const auto& pts = tab.rule.points;
    out.val.resize(pts.size());
    out.div.resize(pts.size());
    for (std::size_t q = 0; q < pts.size(); ++q) {
      out.val[q] = f ? f(pts[q], t) : Mat2::Zero();
      out.div[q] = div ? div(pts[q], t) : Vec2::Zero();
    }
  };
}

ScalField exact_scalar(ScalarFn f, double t) {
  return [f = std::move(f), t](int, const BasisTable& tab, std::vector<double>& out) {
    const auto& pts = tab.rule.points;
    out.resize(pts.size());
    for (std::size_t q = 0; q < pts.size(); ++q) out[q] = f ? f(pts[q], t) : 0.0;
  };
}

VecField combine(double a, VecField x, double b, VecField y) {
  return [a, b, x = std::move(x), y = std::move(y)](int cell, const BasisTable& tab, VecSample& out) {
    VecSample sy;
    x(cell, tab, out);
    y(cell, tab, sy);
    for (std::size_t q = 0; q < out.val.size(); ++q) {
      out.val[q] = a * out.val[q] + b * sy.val[q];
      out.grad[q] = a * out.grad[q] + b * sy.grad[q];
    }
  };
}

VecField operator-(VecField a, VecField b) { return combine(1.0, std::move(a), -1.0, std::move(b)); }

TenField operator-(TenField a, TenField b) {
  return [a = std::move(a), b = std::move(b)](int cell, const BasisTable& tab, TenSample& out) {
    TenSample sb;
    a(cell, tab, out);
    b(cell, tab, sb);
    for (std::size_t q = 0; q < out.val.size(); ++q) {
      out.val[q] -= sb.val[q];
      out.div[q] -= sb.div[q];
    }
  };
}

ScalField operator-(ScalField a, ScalField b) {
  return [a = std::move(a), b = std::move(b)](int cell, const BasisTable& tab, std::vector<double>& out) {
    std::vector<double> sb;
    a(cell, tab, out);
    b(cell, tab, sb);
    for (std::size_t q = 0; q < out.size(); ++q) out[q] -= sb[q];
  };
}

// ---------------------------------------------------------------- energy norms

namespace {

double sq(double x) { return x * x; }

Mat2 sym(const Mat2& g) { return 0.5 * (g + g.transpose()); }

double interface_fluid_chi(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec, int fi) {
  const Face& f = space.mesh().face(fi);
  const int K = f.cells[1];
  const double p = space.cell_degree(K);
  return spec.c3 * p * p / (mat.fluid(K).rho_f * space.mesh().cell(K).diameter);
}

}  // namespace

PoroEnergy poro_energy(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec, const VecField& u,
                       const VecField& w, const VecField& v, const VecField& z) {
  const auto& mesh = space.mesh();
  PoroEnergy e;
  VecSample su, sw, sv, sz;
  for (int K : mesh.region_cells(Region::Poro)) {
    const auto& m = mat.poro(K);
    const auto& tab = space.cell_table(K);
    u(K, tab, su);
    w(K, tab, sw);
    v(K, tab, sv);
    z(K, tab, sz);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const double wq = tab.rule.weights[q];
      e.rate_u += wq * sv.val[q].squaredNorm();
      e.rate_w += wq * sz.val[q].squaredNorm();
      e.damping += wq * m.eta_k() * sw.val[q].squaredNorm();
      const Mat2 eps = sym(su.grad[q]);
      e.dg_e_volume += wq * (2 * m.mu * eps.squaredNorm() + m.lambda * sq(eps.trace()));
      e.dg_p_volume += wq * m.m * sq(m.beta * su.grad[q].trace() + sw.grad[q].trace());
    }
  }
  const double gamma = mat.interface().gamma;
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    const auto& rule = space.face_rule(fi);
    if (f.tag == FaceTag::Interface) {
      if (gamma == 0.0) continue;
      w(f.cells[0], space.face_table(fi, 0), sw);
      for (std::size_t q = 0; q < rule.size(); ++q) e.robin += rule.weights[q] * gamma * sq(sw.val[q].dot(f.normal));
      continue;
    }
    if (!is_poro_sipg_face(f.tag)) continue;
    const double chi_e = penalty_chi(space, mat, spec, fi, PenaltyKind::Elastic);
    const double chi_p = penalty_chi(space, mat, spec, fi, PenaltyKind::Pressure);
    std::vector<Vec2> ju(rule.size(), Vec2::Zero()), jz(rule.size(), Vec2::Zero());
    const int nsides = f.is_boundary() ? 1 : 2;
    for (int s = 0; s < nsides; ++s) {
      const int K = f.cells[static_cast<std::size_t>(s)];
      const double sgn = s == 0 ? 1.0 : -1.0;
      const double beta = mat.poro(K).beta;
      const auto& tab = space.face_table(fi, s);
      u(K, tab, su);
      w(K, tab, sw);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        ju[q] += sgn * su.val[q];
        jz[q] += sgn * (beta * su.val[q] + sw.val[q]);
      }
    }
    for (std::size_t q = 0; q < rule.size(); ++q) {
      e.dg_e_jump += rule.weights[q] * chi_e * ju[q].squaredNorm();
      e.dg_p_jump += rule.weights[q] * chi_p * sq(jz[q].dot(f.normal));
    }
  }
  return e;
}

FluidEnergy fluid_energy(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec, const TenField& S) {
  const auto& mesh = space.mesh();
  FluidEnergy e;
  TenSample ss;
  for (int K : mesh.region_cells(Region::Fluid)) {
    const auto& fl = mat.fluid(K);
    const auto& tab = space.cell_table(K);
    S(K, tab, ss);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const double wq = tab.rule.weights[q];
      e.deviatoric += wq * dev(ss.val[q]).squaredNorm() / (2 * fl.mu_f);
      e.dg_f_volume += wq * ss.div[q].squaredNorm() / fl.rho_f;
    }
  }
  const double delta = mat.interface().delta;
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    const auto& rule = space.face_rule(fi);
    if (f.tag == FaceTag::Interface) {
      S(f.cells[1], space.face_table(fi, 1), ss);
      const Vec2 tp = rotate_minus_90(f.normal);
      for (std::size_t q = 0; q < rule.size(); ++q) e.slip += rule.weights[q] * sq((ss.val[q] * f.normal).dot(tp)) / delta;
      continue;
    }
    if (!is_fluid_sipg_face(f.tag)) continue;
    const double chi = penalty_chi(space, mat, spec, fi, PenaltyKind::Fluid);
    std::vector<Vec2> j(rule.size(), Vec2::Zero());
    const int nsides = f.is_boundary() ? 1 : 2;
    for (int s = 0; s < nsides; ++s) {
      const double sgn = s == 0 ? 1.0 : -1.0;
      S(f.cells[static_cast<std::size_t>(s)], space.face_table(fi, s), ss);
      for (std::size_t q = 0; q < rule.size(); ++q) j[q] += sgn * (ss.val[q] * f.normal);
    }
    for (std::size_t q = 0; q < rule.size(); ++q) e.dg_f_jump += rule.weights[q] * chi * j[q].squaredNorm();
  }
  return e;
}

double l2_norm_sq(const DgSpace& space, Region region, const ScalField& f) {
  double acc = 0.0;
  std::vector<double> v;
  for (int K : space.mesh().region_cells(region)) {
    const auto& tab = space.cell_table(K);
    f(K, tab, v);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) acc += tab.rule.weights[q] * v[q] * v[q];
  }
  return acc;
}

double energy_norm(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec, const Eigen::VectorXd& X,
                   NormKind which) {
  POLYDG_THROW_IF(X.size() != space.ndof(), InvalidArgument, "energy_norm: state size does not match the space");
  const bool need_p = which != NormKind::Ef && which != NormKind::dGf;
  const bool need_f = which == NormKind::Ef || which == NormKind::E || which == NormKind::dGf;
  PoroEnergy pe;
  FluidEnergy fe;
  if (need_p)
    pe = poro_energy(space, mat, spec, discrete_vector(space, Field::U, X), discrete_vector(space, Field::W, X),
                     discrete_vector(space, Field::V, X), discrete_vector(space, Field::Z, X));
  if (need_f) fe = fluid_energy(space, mat, spec, discrete_tensor(space, X));
  switch (which) {
    case NormKind::Ep: return std::sqrt(pe.total());
    case NormKind::Ef: return std::sqrt(fe.total());
    case NormKind::E: return std::sqrt(pe.total() + fe.total());
    case NormKind::dGe: return std::sqrt(pe.dg_e());
    case NormKind::dGp: return std::sqrt(pe.dg_p());
    case NormKind::dGf: return std::sqrt(fe.dg_f());
  }
  return 0.0;
}

ErrorReport error_vs_exact(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec,
                           const Eigen::VectorXd& X, const ManufacturedCase& mc, double t) {
  POLYDG_THROW_IF(t < 0.0, InvalidArgument, fmt::format("error_vs_exact: negative time {}", t));
  auto zero_grad = TensorFn{};
  ErrorReport r;
  r.poro = poro_energy(space, mat, spec, exact_vector(mc.u, mc.grad_u, t) - discrete_vector(space, Field::U, X),
                       exact_vector(mc.w, mc.grad_w, t) - discrete_vector(space, Field::W, X),
                       exact_vector(mc.u_t, zero_grad, t) - discrete_vector(space, Field::V, X),
                       exact_vector(mc.w_t, zero_grad, t) - discrete_vector(space, Field::Z, X));
  r.fluid = fluid_energy(space, mat, spec, exact_tensor(mc.Sigma, mc.div_Sigma, t) - discrete_tensor(space, X));
  r.err_Ep = std::sqrt(r.poro.total());
  r.err_Ef = std::sqrt(r.fluid.total());
  r.err_r = std::sqrt(l2_norm_sq(space, Region::Fluid, exact_scalar(mc.r, t) - discrete_rotation(space, X)));
  return r;
}

// ---------------------------------------------------------------- convergence

double eoc(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

void ConvergenceTable::compute_eoc() {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto& a = rows[i - 1];
    auto& b = rows[i];
    b.eoc_Ep = eoc(a.err_Ep, b.err_Ep, a.h, b.h);
    b.eoc_Ef = eoc(a.err_Ef, b.err_Ef, a.h, b.h);
  }
}

std::string ConvergenceTable::to_csv() const {
  std::string out = "h,p,ndof,cells,err_Ep,err_Ef,eoc_Ep,eoc_Ef,err_r,err_r_mid\n";
  for (const auto& r : rows)
    out += fmt::format("{:.10g},{},{},{},{:.10e},{:.10e},{:.6f},{:.6f},{:.10e},{:.10e}\n", r.h, r.p, r.ndof, r.cells, r.err_Ep,
                       r.err_Ef, r.eoc_Ep, r.eoc_Ef, r.err_r, r.err_r_mid);
  return out;
}

double weak_symmetry_defect(const DgSpace& space, const GlobalSystem& sys, const Eigen::VectorXd& X) {
  const Eigen::VectorXd S = X.segment(space.offset(Field::S), space.size(Field::S));
  const double ns = S.lpNorm<Eigen::Infinity>();
  if (ns == 0.0) return 0.0;
  return (sys.fluid.Bf.transpose() * S).lpNorm<Eigen::Infinity>() / ns;
}

ManufacturedRun solve_manufactured(const ManufacturedCase& mc, std::shared_ptr<const PolyMesh> mesh, int p_p, int p_f,
                                   const ThetaScheme& scheme, const PenaltySpec& spec, double T) {
  DgSpace space(mesh, p_p, p_f);
  MaterialModel mat(*mesh, mc.params.poro, mc.params.fluid, mc.params.iface);
  const GlobalSystem sys = assemble_system(space, mat, spec);
  const SimState x0 = project_initial(space, mc.initial(0.0), 0.0);
  ManufacturedRun out;
  RunOptions opts;
  opts.T = T;
  opts.observer = [&](const SimState& s) { out.weak_symmetry = std::max(out.weak_symmetry, weak_symmetry_defect(space, sys, s.X)); };
  const auto load = [&](double t) { return assemble_load(space, mat, spec, mc.sources, t); };
  Trajectory traj = run(sys, scheme, x0, load, opts);
  out.state = std::move(traj.final_state);
  out.errors = error_vs_exact(space, mat, spec, out.state.X, mc, out.state.t);
  const Eigen::VectorXd mid = 0.5 * (out.state.X + traj.previous_state.X);
  out.err_r_mid = std::sqrt(l2_norm_sq(space, Region::Fluid,
                                       exact_scalar(mc.r, out.state.t - 0.5 * scheme.dt) - discrete_rotation(space, mid)));
  out.ndof = space.ndof();
  double h = 0.0;
  for (int c = 0; c < mesh->num_cells(); ++c) h = std::max(h, mesh->cell(c).diameter);
  out.h = h;
  return out;
}

namespace {

ConvergenceRow row_of(const ManufacturedRun& r, int p, int cells, double seconds) {
  ConvergenceRow row;
  row.h = r.h;
  row.p = p;
  row.ndof = r.ndof;
  row.cells = cells;
  row.err_Ep = r.errors.err_Ep;
  row.err_Ef = r.errors.err_Ef;
  row.err_r = r.errors.err_r;
  row.err_r_mid = r.err_r_mid;
  row.seconds = seconds;
  return row;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ConvergenceTable run_convergence(const ManufacturedCase& mc, const std::vector<std::shared_ptr<const PolyMesh>>& meshes,
                                 int p, const ThetaScheme& scheme, const PenaltySpec& spec, double T) {
  ConvergenceTable table;
  table.rows = batched_map<ConvergenceRow>(static_cast<int>(meshes.size()), 1, [&](int b, int) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& mesh = meshes[static_cast<std::size_t>(b)];
    const auto r = solve_manufactured(mc, mesh, p, p, scheme, spec, T);
    spdlog::info("{} p={} cells={} ndof={} err_Ep={:.3e} err_Ef={:.3e}", mc.name, p, mesh->num_cells(), r.ndof,
                 r.errors.err_Ep, r.errors.err_Ef);
    return row_of(r, p, mesh->num_cells(), seconds_since(t0));
  });
  table.compute_eoc();
  return table;
}

ConvergenceTable run_pstudy(const ManufacturedCase& mc, std::shared_ptr<const PolyMesh> mesh, const std::vector<int>& degrees,
                            const ThetaScheme& scheme, const PenaltySpec& spec, double T) {
  ConvergenceTable table;
  table.rows = batched_map<ConvergenceRow>(static_cast<int>(degrees.size()), 1, [&](int b, int) {
    const auto t0 = std::chrono::steady_clock::now();
    const int p = degrees[static_cast<std::size_t>(b)];
    const auto r = solve_manufactured(mc, mesh, p, p, scheme, spec, T);
    spdlog::info("{} p={} ndof={} err_Ep={:.3e} err_Ef={:.3e}", mc.name, p, r.ndof, r.errors.err_Ep, r.errors.err_Ef);
    return row_of(r, p, mesh->num_cells(), seconds_since(t0));
  });
  return table;
}

// ---------------------------------------------------------------- energy monitor

double stored_energy(const DgSpace& space, const GlobalSystem& sys, const Eigen::VectorXd& X) {
  const auto seg = [&](Field f) { return X.segment(space.offset(f), space.size(f)); };
  const Eigen::VectorXd U = seg(Field::U), W = seg(Field::W), V = seg(Field::V), Z = seg(Field::Z), S = seg(Field::S);
  const auto& p = sys.poro;
  const double kinetic = V.dot(p.M_rho * V) + 2 * V.dot(p.M_rhof * Z) + Z.dot(p.M_rhow * Z);
  const double elastic = U.dot((p.Ae + p.Bp_beta2) * U) + 2 * U.dot(p.Bp_beta * W) + W.dot(p.Bp * W);
  const double fluid = S.dot(sys.fluid.Af * S);
  return 0.5 * (kinetic + elastic + fluid);
}

EnergyRecord energy_record(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec,
                           const GlobalSystem& sys, const SimState& s) {
  EnergyRecord r;
  r.t = s.t;
  const double ep = energy_norm(space, mat, spec, s.X, NormKind::Ep);
  const double ef = energy_norm(space, mat, spec, s.X, NormKind::Ef);
  r.E_p = ep * ep;
  r.E_f = ef * ef;
  r.E = r.E_p + r.E_f;
  r.E_stored = stored_energy(space, sys, s.X);
  return r;
}

std::vector<EnergyRecord> energy_monitor(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec,
                                         const GlobalSystem& sys, const std::vector<SimState>& trajectory) {
  std::vector<EnergyRecord> out;
  out.reserve(trajectory.size());
  for (const auto& s : trajectory) out.push_back(energy_record(space, mat, spec, sys, s));
  return out;
}

std::string energy_csv(const std::vector<EnergyRecord>& records) {
  std::string out = "t,E,E_p,E_f,E_stored\n";
  for (const auto& r : records) out += fmt::format("{:.10g},{:.12e},{:.12e},{:.12e},{:.12e}\n", r.t, r.E, r.E_p, r.E_f, r.E_stored);
  return out;
}

// ---------------------------------------------------------------- inf-sup

InfSupResult infsup_estimate(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec, int max_dofs) {
  const int ns = space.size(Field::S), nr = space.size(Field::R);
  POLYDG_THROW_IF(ns + nr > max_dofs, InvalidArgument,
                  fmt::format("inf-sup estimate needs a dense eigensolve; {} stress + {} rotation unknowns exceed the "
                              "limit {} (use a coarser mesh or lower p_f)",
                              ns, nr, max_dofs));
  POLYDG_THROW_IF(nr == 0, InvalidArgument, "inf-sup estimate needs p_f >= 1");
  const auto& mesh = space.mesh();
  const int d = space.dim(Region::Fluid);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(ns, ns);

  // Volume: (2 mu_f)^-1 (dev s, dev t) + rho_f^-1 (div s, div t)
  for (int K : mesh.region_cells(Region::Fluid)) {
    const auto& fl = mat.fluid(K);
    const auto& tab = space.cell_table(K);
    const int c0 = space.cell_start(Field::S, K);
    const auto nq = tab.phi.rows();
    Eigen::MatrixXd Dev = Eigen::MatrixXd::Zero(4 * nq, 4 * d), Div = Eigen::MatrixXd::Zero(2 * nq, 4 * d);
    Eigen::VectorXd w4(4 * nq), w2(2 * nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const double wq = tab.rule.weights[static_cast<std::size_t>(q)];
      for (int k = 0; k < 4; ++k) w4(4 * q + k) = wq / (2 * fl.mu_f);
      for (int k = 0; k < 2; ++k) w2(2 * q + k) = wq / fl.rho_f;
      for (int a = 0; a < d; ++a) {
        const double ph = tab.phi(q, a);
        // dev: diagonal entries (s11 - s22)/2 and (s22 - s11)/2
        Dev(4 * q + 0, 0 * d + a) = 0.5 * ph;
        Dev(4 * q + 0, 3 * d + a) = -0.5 * ph;
        Dev(4 * q + 3, 0 * d + a) = -0.5 * ph;
        Dev(4 * q + 3, 3 * d + a) = 0.5 * ph;
        Dev(4 * q + 1, 1 * d + a) = ph;
        Dev(4 * q + 2, 2 * d + a) = ph;
        for (int c = 0; c < 4; ++c) Div(2 * q + c / 2, c * d + a) = c % 2 == 0 ? tab.dx(q, a) : tab.dy(q, a);
      }
    }
    G.block(c0, c0, 4 * d, 4 * d) += Dev.transpose() * w4.asDiagonal() * Dev + Div.transpose() * w2.asDiagonal() * Div;
  }
  // Faces: chi_f |[tau]|^2 on interior/Neumann faces, delta^-1 (tau n.t)^2 + chi_f |tau n|^2 on the interface.
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& f = mesh.face(fi);
    const bool iface = f.tag == FaceTag::Interface;
    if (!iface && !is_fluid_sipg_face(f.tag)) continue;
    const auto& rule = space.face_rule(fi);
    const auto nq = static_cast<Eigen::Index>(rule.size());
    const Vec2 n = f.normal, tp = rotate_minus_90(n);
    std::vector<int> sides;
    if (iface) sides = {1};
    else if (f.is_boundary()) sides = {0};
    else sides = {0, 1};
    const double chi = iface ? interface_fluid_chi(space, mat, spec, fi) : penalty_chi(space, mat, spec, fi, PenaltyKind::Fluid);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * nq, 4 * d * static_cast<Eigen::Index>(sides.size()));
    Eigen::MatrixXd Tt = Eigen::MatrixXd::Zero(nq, J.cols());
    std::vector<int> dofs;
    for (std::size_t k = 0; k < sides.size(); ++k) {
      const int s = sides[k];
      const double sgn = (s == 0 || iface) ? 1.0 : -1.0;
      const auto& tab = space.face_table(fi, s);
      const Eigen::Index o = 4 * d * static_cast<Eigen::Index>(k);
      for (Eigen::Index q = 0; q < nq; ++q)
        for (int a = 0; a < d; ++a)
          for (int c = 0; c < 4; ++c) {
            const int i = c / 2, j = c % 2;
            J(2 * q + i, o + c * d + a) += sgn * tab.phi(q, a) * n(j);
            Tt(q, o + c * d + a) += tab.phi(q, a) * n(j) * tp(i);
          }
      const int c0 = space.cell_start(Field::S, f.cells[static_cast<std::size_t>(s)]);
      for (int i = 0; i < 4 * d; ++i) dofs.push_back(c0 + i);
    }
    Eigen::VectorXd w2(2 * nq), w1(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      w1(q) = rule.weights[static_cast<std::size_t>(q)] / mat.interface().delta;
      w2(2 * q) = w2(2 * q + 1) = chi * rule.weights[static_cast<std::size_t>(q)];
    }
    Eigen::MatrixXd local = J.transpose() * w2.asDiagonal() * J;
    if (iface) local += Tt.transpose() * w1.asDiagonal() * Tt;
    for (std::size_t a = 0; a < dofs.size(); ++a)
      for (std::size_t b = 0; b < dofs.size(); ++b)
        G(dofs[a], dofs[b]) += local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }

  // R uses orthonormal modes, so its L2 Gram matrix is the identity: beta^2 = lambda_min(B' G^-1 B).
  const Eigen::MatrixXd B = Eigen::MatrixXd(assemble_fluid(space, mat, spec).Bf);
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  POLYDG_THROW_IF(llt.info() != Eigen::Success, SolverError, "inf-sup: stress Gram matrix is not positive definite");
  const Eigen::MatrixXd C = llt.matrixL().solve(B);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C.transpose() * C, Eigen::EigenvaluesOnly);
  InfSupResult r;
  r.beta = std::sqrt(std::max(0.0, eig.eigenvalues().minCoeff()));
  r.n_stress = ns;
  r.n_rotation = nr;
  return r;
}

// ---------------------------------------------------------------- matrix diagnostics

double symmetry_residual(const SpMat& m) {
  const SpMat d = m - SpMat(m.transpose());
  double num = 0.0, den = 0.0;
  for (int c = 0; c < d.outerSize(); ++c)
    for (SpMat::InnerIterator it(d, c); it; ++it) num = std::max(num, std::abs(it.value()));
  for (int c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it) den = std::max(den, std::abs(it.value()));
  return den > 0.0 ? num / den : num;
}

double MatrixReport::max_symmetry() const {
  double m = 0.0;
  for (const auto& [k, v] : symmetry) m = std::max(m, v);
  return m;
}

namespace {

double max_abs(const SpMat& m) {
  double r = 0.0;
  for (int c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it) r = std::max(r, std::abs(it.value()));
  return r;
}

SpMat block2(const SpMat& a, const SpMat& b, const SpMat& c, const SpMat& d) {
  const auto n = a.rows();
  Triplets t;
  auto put = [&t](const SpMat& m, Eigen::Index r0, Eigen::Index c0) {
    for (int c = 0; c < m.outerSize(); ++c)
      for (SpMat::InnerIterator it(m, c); it; ++it) t.emplace_back(static_cast<int>(r0 + it.row()), static_cast<int>(c0 + it.col()), it.value());
  };
  put(a, 0, 0);
  put(b, 0, n);
  put(c, n, 0);
  put(d, n, n);
  SpMat out(2 * n, 2 * n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

MatrixReport matrix_diagnostics(const DgSpace& space, const GlobalSystem& sys) {
  (void)space;
  MatrixReport r;
  const auto& p = sys.poro;
  const auto& f = sys.fluid;
  r.symmetry["M_rho"] = symmetry_residual(p.M_rho);
  r.symmetry["M_rhof"] = symmetry_residual(p.M_rhof);
  r.symmetry["M_rhow"] = symmetry_residual(p.M_rhow);
  r.symmetry["D_etak"] = symmetry_residual(p.D_etak);
  r.symmetry["D_gamma"] = symmetry_residual(p.D_gamma);
  r.symmetry["Ae"] = symmetry_residual(p.Ae);
  r.symmetry["Bp"] = symmetry_residual(p.Bp);
  r.symmetry["Bp_beta2"] = symmetry_residual(p.Bp_beta2);
  r.symmetry["Mf"] = symmetry_residual(f.Mf);
  r.symmetry["Df"] = symmetry_residual(f.Df);
  r.symmetry["Af"] = symmetry_residual(f.Af);

  const SpMat density = block2(p.M_rho, p.M_rhof, p.M_rhof, p.M_rhow);
  Eigen::SimplicialLLT<SpMat> llt_density(density);
  r.density_pd = llt_density.info() == Eigen::Success;
  Eigen::SimplicialLLT<SpMat> llt_e(p.Ae);
  r.elastic_pd = llt_e.info() == Eigen::Success;
  const SpMat mf = f.Mf + f.Df;
  // block diagonal per fluid cell; singular (isotropic kernel), so eigenvalues rather than a factorization
  r.fluid_mass_psd = true;
  const double tol_psd = -1e-12 * std::max(1.0, max_abs(mf));
  const int nb = 4 * space.dim(Region::Fluid);
  for (int K : space.mesh().region_cells(Region::Fluid)) {
    const int s0 = space.cell_start(Field::S, K);
    const Eigen::MatrixXd blk(sparse_block(mf, s0, s0, nb, nb));
    const Eigen::MatrixXd sym = 0.5 * (blk + blk.transpose());
    if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff() < tol_psd) {
      r.fluid_mass_psd = false;
      break;
    }
  }

  const auto& c = sys.coupling;
  const SpMat dv = c.Cfp_v - SpMat((c.N_alpha + c.T).transpose());
  const SpMat dz = c.Cfp_z - SpMat(c.N.transpose());
  r.coupling_transpose = std::max(max_abs(dv), max_abs(dz));
  return r;
}

}  // namespace polydg
