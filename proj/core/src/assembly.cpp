#include "polydg/assembly.hpp"

#include "polydg/error.hpp"
#include "polydg/parallel.hpp"

#include <fmt/format.h>

#include <fstream>

namespace polydg {

namespace {

constexpr int kBatch = 64;

struct Parts {
  std::map<std::string, Triplets> t;
};

SpMat to_sparse(int rows, int cols, const Triplets& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

/// Merges the per-batch triplet lists of every named block in batch order.
std::map<std::string, Triplets> merge(std::vector<Parts>&& parts) {
  std::map<std::string, Triplets> out;
  for (auto& p : parts)
    for (auto& [name, t] : p.t) {
      auto& dst = out[name];
      dst.insert(dst.end(), t.begin(), t.end());
    }
  return out;
}

void scatter(Triplets& out, const std::vector<int>& rows, const std::vector<int>& cols, const Eigen::MatrixXd& local) {
  for (Eigen::Index j = 0; j < local.cols(); ++j)
    for (Eigen::Index i = 0; i < local.rows(); ++i)
      if (local(i, j) != 0.0) out.emplace_back(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)], local(i, j));
}

std::vector<int> range(int start, int n) {
  std::vector<int> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = start + i;
  return r;
}

Eigen::VectorXd weights_of(const QuadratureRule& r, int repeat = 1) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(r.size()) * repeat);
  for (std::size_t q = 0; q < r.size(); ++q)
    for (int k = 0; k < repeat; ++k) w(static_cast<Eigen::Index>(q) * repeat + k) = r.weights[q];
  return w;
}

/// -F'WJ - J'WF + chi J'WJ over the concatenated side DoFs.
Eigen::MatrixXd sipg_local(const Eigen::MatrixXd& J, const Eigen::MatrixXd& F, const Eigen::VectorXd& w, double chi) {
  const Eigen::MatrixXd WJ = w.asDiagonal() * J;
  const Eigen::MatrixXd FtWJ = F.transpose() * WJ;
  return chi * (J.transpose() * WJ) - FtWJ - FtWJ.transpose();
}

Vec2 tangent(const Vec2& n) { return rotate_minus_90(n); }

}  // namespace

bool is_poro_sipg_face(FaceTag tag) { return tag == FaceTag::InteriorP || tag == FaceTag::DirichletP; }
bool is_fluid_sipg_face(FaceTag tag) { return tag == FaceTag::InteriorF || tag == FaceTag::NeumannF; }

double penalty_chi(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec, int face, PenaltyKind kind) {
  const auto& mesh = space.mesh();
  const Face& f = mesh.face(face);
  const Region want = kind == PenaltyKind::Fluid ? Region::Fluid : Region::Poro;
  POLYDG_THROW_IF(f.tag == FaceTag::Interface || region_of(f.tag) != want, InvalidArgument,
                  fmt::format("face {} ({}) does not belong to the region of this penalty", face, to_string(f.tag)));
  double c = 0.0;
  double best = 0.0;
  switch (kind) {
    case PenaltyKind::Elastic: c = spec.c1; break;
    case PenaltyKind::Pressure: c = spec.c2; break;
    case PenaltyKind::Fluid: c = spec.c3; break;
  }
  for (int cell : f.cells) {
    if (cell < 0) continue;
    const auto& K = mesh.cell(cell);
    const double p = space.cell_degree(cell);
    double coef = 0.0;
    if (kind == PenaltyKind::Elastic) {
      const auto& m = mat.poro(cell);
      coef = stiffness_norm(m.lambda, m.mu);
    } else if (kind == PenaltyKind::Pressure) {
      coef = mat.poro(cell).m;
    } else {
      coef = 1.0 / mat.fluid(cell).rho_f;
    }
    best = std::max(best, coef * p * p / K.diameter);
  }
  if (f.is_boundary() && !spec.scale_boundary) return best;
  return c * best;
}

PoroBlocks assemble_poro(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec) {
  const auto& mesh = space.mesh();
  const int np = space.size(Field::U);
  const int d = space.dim(Region::Poro);
  const auto& pcells = mesh.region_cells(Region::Poro);

  auto cell_parts = batched_map<Parts>(static_cast<int>(pcells.size()), kBatch, [&](int b, int e) {
    Parts out;
    for (int k = b; k < e; ++k) {
      const int K = pcells[static_cast<std::size_t>(k)];
      const auto& m = mat.poro(K);
      const auto& t = space.cell_table(K);
      const auto nq = t.phi.rows();
      const Eigen::VectorXd w = weights_of(t.rule);
      const Eigen::MatrixXd G = t.phi.transpose() * w.asDiagonal() * t.phi;
      Eigen::MatrixXd Mass = Eigen::MatrixXd::Zero(2 * d, 2 * d);
      Mass.topLeftCorner(d, d) = G;
      Mass.bottomRightCorner(d, d) = G;
      Eigen::MatrixXd E = Eigen::MatrixXd::Zero(3 * nq, 2 * d);
      Eigen::MatrixXd D(nq, 2 * d);
      const double s2 = std::sqrt(0.5);  // sqrt(2) * (1/2) for the shear entry
      for (Eigen::Index q = 0; q < nq; ++q) {
        for (int a = 0; a < d; ++a) {
          const double px = t.dx(q, a), py = t.dy(q, a);
          E(3 * q + 0, a) = px;
          E(3 * q + 2, a) = s2 * py;
          E(3 * q + 1, d + a) = py;
          E(3 * q + 2, d + a) = s2 * px;
          D(q, a) = px;
          D(q, d + a) = py;
        }
      }
      const Eigen::VectorXd w3 = weights_of(t.rule, 3);
      const Eigen::MatrixXd DtWD = D.transpose() * w.asDiagonal() * D;
      const Eigen::MatrixXd Ae = 2.0 * m.mu * (E.transpose() * w3.asDiagonal() * E) + m.lambda * DtWD;
      const auto dofs = range(space.cell_start(Field::U, K), 2 * d);
      scatter(out.t["M_rho"], dofs, dofs, m.rho() * Mass);
      scatter(out.t["M_rhof"], dofs, dofs, m.rho_f * Mass);
      scatter(out.t["M_rhow"], dofs, dofs, m.rho_w() * Mass);
      scatter(out.t["D_etak"], dofs, dofs, m.eta_k() * Mass);
      scatter(out.t["Ae"], dofs, dofs, Ae);
      scatter(out.t["Bp"], dofs, dofs, m.m * DtWD);
    }
    return out;
  });

  std::vector<int> faces;
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (is_poro_sipg_face(mesh.face(f).tag)) faces.push_back(f);

  auto face_parts = batched_map<Parts>(static_cast<int>(faces.size()), kBatch, [&](int b, int e) {
    Parts out;
    for (int k = b; k < e; ++k) {
      const int fi = faces[static_cast<std::size_t>(k)];
      const Face& f = mesh.face(fi);
      const Vec2 n = f.normal;
      const int nsides = f.is_boundary() ? 1 : 2;
      const double omega = f.is_boundary() ? 1.0 : 0.5;
      const auto nq = static_cast<Eigen::Index>(space.face_rule(fi).size());
      Eigen::MatrixXd Je = Eigen::MatrixXd::Zero(2 * nq, 2 * d * nsides), Fe = Je;
      Eigen::MatrixXd Jp = Eigen::MatrixXd::Zero(nq, 2 * d * nsides), Fp = Jp;
      std::vector<int> dofs;
      for (int s = 0; s < nsides; ++s) {
        const int K = f.cells[static_cast<std::size_t>(s)];
        const auto& m = mat.poro(K);
        const auto& t = space.face_table(fi, s);
        const double sgn = s == 0 ? 1.0 : -1.0;
        const Eigen::Index o = 2 * d * s;
        const double lam = m.lambda, mu = m.mu;
        for (Eigen::Index q = 0; q < nq; ++q) {
          for (int a = 0; a < d; ++a) {
            const double ph = t.phi(q, a), px = t.dx(q, a), py = t.dy(q, a);
            Je(2 * q + 0, o + a) = sgn * ph;
            Je(2 * q + 1, o + d + a) = sgn * ph;
            Fe(2 * q + 0, o + a) = omega * ((2 * mu + lam) * px * n.x() + mu * py * n.y());
            Fe(2 * q + 1, o + a) = omega * (mu * py * n.x() + lam * px * n.y());
            Fe(2 * q + 0, o + d + a) = omega * (lam * py * n.x() + mu * px * n.y());
            Fe(2 * q + 1, o + d + a) = omega * (mu * px * n.x() + (2 * mu + lam) * py * n.y());
            Jp(q, o + a) = sgn * ph * n.x();
            Jp(q, o + d + a) = sgn * ph * n.y();
            Fp(q, o + a) = omega * m.m * px;
            Fp(q, o + d + a) = omega * m.m * py;
          }
        }
        const auto r = range(space.cell_start(Field::U, K), 2 * d);
        dofs.insert(dofs.end(), r.begin(), r.end());
      }
      const Eigen::VectorXd w = weights_of(space.face_rule(fi));
      const Eigen::VectorXd w2 = weights_of(space.face_rule(fi), 2);
      scatter(out.t["Ae"], dofs, dofs, sipg_local(Je, Fe, w2, penalty_chi(space, mat, spec, fi, PenaltyKind::Elastic)));
      scatter(out.t["Bp"], dofs, dofs, sipg_local(Jp, Fp, w, penalty_chi(space, mat, spec, fi, PenaltyKind::Pressure)));
    }
    return out;
  });

  // gamma term on the interface (p side only).
  const auto ifaces = mesh.faces_with_tag(FaceTag::Interface);
  auto iface_parts = batched_map<Parts>(static_cast<int>(ifaces.size()), kBatch, [&](int b, int e) {
    Parts out;
    const double gamma = mat.interface().gamma;
    for (int k = b; k < e; ++k) {
      const int fi = ifaces[static_cast<std::size_t>(k)];
      const Face& f = mesh.face(fi);
      const auto& t = space.face_table(fi, 0);
      const auto nq = t.phi.rows();
      Eigen::MatrixXd Wn(nq, 2 * d);
      Wn.leftCols(d) = f.normal.x() * t.phi;
      Wn.rightCols(d) = f.normal.y() * t.phi;
      const Eigen::VectorXd w = weights_of(space.face_rule(fi));
      const auto dofs = range(space.cell_start(Field::U, f.cells[0]), 2 * d);
      if (gamma != 0.0) scatter(out.t["D_gamma"], dofs, dofs, gamma * (Wn.transpose() * w.asDiagonal() * Wn));
    }
    return out;
  });

  std::vector<Parts> all;
  for (auto* v : {&cell_parts, &face_parts, &iface_parts})
    for (auto& p : *v) all.push_back(std::move(p));
  auto merged = merge(std::move(all));

  PoroBlocks blocks;
  blocks.M_rho = to_sparse(np, np, merged["M_rho"]);
  blocks.M_rhof = to_sparse(np, np, merged["M_rhof"]);
  blocks.M_rhow = to_sparse(np, np, merged["M_rhow"]);
  blocks.D_etak = to_sparse(np, np, merged["D_etak"]);
  blocks.D_gamma = to_sparse(np, np, merged["D_gamma"]);
  blocks.Ae = to_sparse(np, np, merged["Ae"]);
  blocks.Bp = to_sparse(np, np, merged["Bp"]);

  Eigen::VectorXd beta(np);
  for (int K : pcells) beta.segment(space.cell_start(Field::U, K), 2 * d).setConstant(mat.poro(K).beta);
  blocks.Bp_beta = beta.asDiagonal() * blocks.Bp;
  blocks.Bp_beta2 = blocks.Bp_beta * beta.asDiagonal();
  blocks.Bp_beta.makeCompressed();
  blocks.Bp_beta2.makeCompressed();
  return blocks;
}

FluidBlocks assemble_fluid(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec) {
  const auto& mesh = space.mesh();
  const int ns = space.size(Field::S);
  const int nr = space.size(Field::R);
  const int d = space.dim(Region::Fluid);
  const int dr = space.dim_r();
  const auto& fcells = mesh.region_cells(Region::Fluid);

  auto cell_parts = batched_map<Parts>(static_cast<int>(fcells.size()), kBatch, [&](int b, int e) {
    Parts out;
    for (int k = b; k < e; ++k) {
      const int K = fcells[static_cast<std::size_t>(k)];
      const auto& m = mat.fluid(K);
      const auto& t = space.cell_table(K);
      const auto nq = t.phi.rows();
      Eigen::MatrixXd Dv = Eigen::MatrixXd::Zero(2 * nq, 4 * d);
      Eigen::MatrixXd Dev = Eigen::MatrixXd::Zero(4 * nq, 4 * d);
      for (Eigen::Index q = 0; q < nq; ++q)
        for (int c = 0; c < 4; ++c) {
          const int i = c / 2, j = c % 2;
          for (int a = 0; a < d; ++a) {
            const double ph = t.phi(q, a);
            Dv(2 * q + i, c * d + a) = j == 0 ? t.dx(q, a) : t.dy(q, a);
            Dev(4 * q + c, c * d + a) += ph;
            if (i == j) {
              Dev(4 * q + 0, c * d + a) -= 0.5 * ph;
              Dev(4 * q + 3, c * d + a) -= 0.5 * ph;
            }
          }
        }
      const Eigen::VectorXd w = weights_of(t.rule);
      const Eigen::MatrixXd G = t.phi.transpose() * w.asDiagonal() * t.phi;
      Eigen::MatrixXd Bf = Eigen::MatrixXd::Zero(4 * d, dr);
      Bf.block(1 * d, 0, d, dr) = G.leftCols(dr);
      Bf.block(2 * d, 0, d, dr) = -G.leftCols(dr);
      const auto sd = range(space.cell_start(Field::S, K), 4 * d);
      const auto rd = range(space.cell_start(Field::R, K), dr);
      scatter(out.t["Af"], sd, sd, (1.0 / m.rho_f) * (Dv.transpose() * weights_of(t.rule, 2).asDiagonal() * Dv));
      scatter(out.t["Mf"], sd, sd, (0.5 / m.mu_f) * (Dev.transpose() * weights_of(t.rule, 4).asDiagonal() * Dev));
      scatter(out.t["Bf"], sd, rd, Bf);
    }
    return out;
  });

  std::vector<int> faces;
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (is_fluid_sipg_face(mesh.face(f).tag)) faces.push_back(f);

  auto face_parts = batched_map<Parts>(static_cast<int>(faces.size()), kBatch, [&](int b, int e) {
    Parts out;
    for (int k = b; k < e; ++k) {
      const int fi = faces[static_cast<std::size_t>(k)];
      const Face& f = mesh.face(fi);
      const Vec2 n = f.normal;
      const int nsides = f.is_boundary() ? 1 : 2;
      const double omega = f.is_boundary() ? 1.0 : 0.5;
      const auto nq = static_cast<Eigen::Index>(space.face_rule(fi).size());
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * nq, 4 * d * nsides), F = J;
      std::vector<int> dofs;
      for (int s = 0; s < nsides; ++s) {
        const int K = f.cells[static_cast<std::size_t>(s)];
        const double rinv = 1.0 / mat.fluid(K).rho_f;
        const auto& t = space.face_table(fi, s);
        const double sgn = s == 0 ? 1.0 : -1.0;
        const Eigen::Index o = 4 * d * s;
        for (Eigen::Index q = 0; q < nq; ++q)
          for (int c = 0; c < 4; ++c) {
            const int i = c / 2, j = c % 2;
            for (int a = 0; a < d; ++a) {
              J(2 * q + i, o + c * d + a) = sgn * t.phi(q, a) * n(j);
              F(2 * q + i, o + c * d + a) = omega * rinv * (j == 0 ? t.dx(q, a) : t.dy(q, a));
            }
          }
        const auto r = range(space.cell_start(Field::S, K), 4 * d);
        dofs.insert(dofs.end(), r.begin(), r.end());
      }
      scatter(out.t["Af"], dofs, dofs,
              sipg_local(J, F, weights_of(space.face_rule(fi), 2), penalty_chi(space, mat, spec, fi, PenaltyKind::Fluid)));
    }
    return out;
  });

  const auto ifaces = mesh.faces_with_tag(FaceTag::Interface);
  auto iface_parts = batched_map<Parts>(static_cast<int>(ifaces.size()), kBatch, [&](int b, int e) {
    Parts out;
    const double dinv = 1.0 / mat.interface().delta;
    for (int k = b; k < e; ++k) {
      const int fi = ifaces[static_cast<std::size_t>(k)];
      const Face& f = mesh.face(fi);
      const Vec2 n = f.normal, tp = tangent(n);
      const auto& t = space.face_table(fi, 1);
      const auto nq = t.phi.rows();
      Eigen::MatrixXd Tt = Eigen::MatrixXd::Zero(nq, 4 * d);
      for (int c = 0; c < 4; ++c) Tt.middleCols(c * d, d) = (tp(c / 2) * n(c % 2)) * t.phi;
      const auto sd = range(space.cell_start(Field::S, f.cells[1]), 4 * d);
      scatter(out.t["Df"], sd, sd, dinv * (Tt.transpose() * weights_of(space.face_rule(fi)).asDiagonal() * Tt));
    }
    return out;
  });

  std::vector<Parts> all;
  for (auto* v : {&cell_parts, &face_parts, &iface_parts})
    for (auto& p : *v) all.push_back(std::move(p));
  auto merged = merge(std::move(all));
  FluidBlocks blocks;
  blocks.Mf = to_sparse(ns, ns, merged["Mf"]);
  blocks.Df = to_sparse(ns, ns, merged["Df"]);
  blocks.Af = to_sparse(ns, ns, merged["Af"]);
  blocks.Bf = to_sparse(ns, nr, merged["Bf"]);
  return blocks;
}

CouplingBlocks assemble_coupling(const DgSpace& space, const MaterialModel& mat) {
  const auto& mesh = space.mesh();
  const int np = space.size(Field::U);
  const int ns = space.size(Field::S);
  const int dp = space.dim(Region::Poro);
  const int df = space.dim(Region::Fluid);
  const double alpha = mat.interface().alpha;
  const auto ifaces = mesh.faces_with_tag(FaceTag::Interface);

  auto parts = batched_map<Parts>(static_cast<int>(ifaces.size()), kBatch, [&](int b, int e) {
    Parts out;
    for (int k = b; k < e; ++k) {
      const int fi = ifaces[static_cast<std::size_t>(k)];
      const Face& f = mesh.face(fi);
      const Vec2 n = f.normal, tp = tangent(n);
      const auto& tpo = space.face_table(fi, 0);
      const auto& tfl = space.face_table(fi, 1);
      const auto nq = tpo.phi.rows();
      // p-side traces v.n and v.t; f-side traces (tau n).n and (tau n).t
      Eigen::MatrixXd Vn(nq, 2 * dp), Vt(nq, 2 * dp), Snn = Eigen::MatrixXd::Zero(nq, 4 * df), Snt = Snn;
      Vn << n.x() * tpo.phi, n.y() * tpo.phi;
      Vt << tp.x() * tpo.phi, tp.y() * tpo.phi;
      for (int c = 0; c < 4; ++c) {
        const int i = c / 2, j = c % 2;
        Snn.middleCols(c * df, df) = (n(i) * n(j)) * tfl.phi;
        Snt.middleCols(c * df, df) = (tp(i) * n(j)) * tfl.phi;
      }
      const Eigen::VectorXd w = weights_of(space.face_rule(fi));
      const auto pd = range(space.cell_start(Field::U, f.cells[0]), 2 * dp);
      const auto sd = range(space.cell_start(Field::S, f.cells[1]), 4 * df);
      const Eigen::MatrixXd SnnWVn = Snn.transpose() * w.asDiagonal() * Vn;
      const Eigen::MatrixXd SntWVt = Snt.transpose() * w.asDiagonal() * Vt;
      scatter(out.t["N"], sd, pd, SnnWVn);
      scatter(out.t["N_alpha"], sd, pd, alpha * SnnWVn);
      scatter(out.t["T"], sd, pd, SntWVt);
      // C^fp assembled from its own definition: test functions (v, z) in the rows.
      const Eigen::MatrixXd VnWSnn = Vn.transpose() * w.asDiagonal() * Snn;
      const Eigen::MatrixXd VtWSnt = Vt.transpose() * w.asDiagonal() * Snt;
      scatter(out.t["Cfp_v"], pd, sd, alpha * VnWSnn + VtWSnt);
      scatter(out.t["Cfp_z"], pd, sd, VnWSnn);
    }
    return out;
  });
  auto merged = merge(std::move(parts));
  CouplingBlocks c;
  c.N = to_sparse(ns, np, merged["N"]);
  c.N_alpha = to_sparse(ns, np, merged["N_alpha"]);
  c.T = to_sparse(ns, np, merged["T"]);
  c.Cfp_v = to_sparse(np, ns, merged["Cfp_v"]);
  c.Cfp_z = to_sparse(np, ns, merged["Cfp_z"]);
  return c;
}

namespace {

void add_block(Triplets& t, const SpMat& m, int r0, int c0, double scale = 1.0) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) t.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()), scale * it.value());
}

void add_identity(Triplets& t, int r0, int c0, int n, double scale) {
  for (int i = 0; i < n; ++i) t.emplace_back(r0 + i, c0 + i, scale);
}

}  // namespace

GlobalSystem build_global(const DgSpace& space, PoroBlocks poro, FluidBlocks fluid, CouplingBlocks coupling) {
  const int np = space.size(Field::U);
  const int ns = space.size(Field::S);
  const int nr = space.size(Field::R);
  auto check = [](const SpMat& m, int r, int c, const char* name) {
    POLYDG_THROW_IF(m.rows() != r || m.cols() != c, InvalidArgument,
                    fmt::format("block {} has shape {}x{}, expected {}x{}", name, m.rows(), m.cols(), r, c));
  };
  for (auto [m, name] : {std::pair{&poro.M_rho, "M_rho"}, {&poro.M_rhof, "M_rhof"}, {&poro.M_rhow, "M_rhow"},
                         {&poro.D_etak, "D_etak"}, {&poro.D_gamma, "D_gamma"}, {&poro.Ae, "Ae"}, {&poro.Bp, "Bp"},
                         {&poro.Bp_beta, "Bp_beta"}, {&poro.Bp_beta2, "Bp_beta2"}})
    check(*m, np, np, name);
  check(fluid.Mf, ns, ns, "Mf");
  check(fluid.Df, ns, ns, "Df");
  check(fluid.Af, ns, ns, "Af");
  check(fluid.Bf, ns, nr, "Bf");
  check(coupling.N, ns, np, "N");
  check(coupling.N_alpha, ns, np, "N_alpha");
  check(coupling.T, ns, np, "T");

  const int oU = space.offset(Field::U), oW = space.offset(Field::W), oV = space.offset(Field::V);
  const int oZ = space.offset(Field::Z), oS = space.offset(Field::S), oR = space.offset(Field::R);
  const int n = space.ndof();
  const SpMat NaT = coupling.N_alpha + coupling.T;
  const SpMat NaT_t = NaT.transpose();
  const SpMat N_t = coupling.N.transpose();
  const SpMat Bf_t = fluid.Bf.transpose();

  Triplets tm;
  add_identity(tm, oU, oU, np, 1.0);
  add_identity(tm, oW, oW, np, 1.0);
  add_block(tm, poro.M_rho, oV, oV);
  add_block(tm, poro.M_rhof, oV, oZ);
  add_block(tm, NaT_t, oV, oS, -1.0);
  add_block(tm, poro.M_rhof, oZ, oV);
  add_block(tm, poro.M_rhow, oZ, oZ);
  add_block(tm, N_t, oZ, oS, -1.0);
  add_block(tm, fluid.Mf, oS, oS);
  add_block(tm, fluid.Df, oS, oS);
  add_block(tm, Bf_t, oR, oS);

  const SpMat Bpb_t = poro.Bp_beta.transpose();
  Triplets ta;
  add_identity(ta, oU, oV, np, -1.0);
  add_identity(ta, oW, oZ, np, -1.0);
  add_block(ta, poro.Ae, oV, oU);
  add_block(ta, poro.Bp_beta2, oV, oU);
  add_block(ta, poro.Bp_beta, oV, oW);
  add_block(ta, Bpb_t, oZ, oU);
  add_block(ta, poro.Bp, oZ, oW);
  add_block(ta, poro.D_etak, oZ, oZ);
  add_block(ta, poro.D_gamma, oZ, oZ);
  add_block(ta, NaT, oS, oV);
  add_block(ta, coupling.N, oS, oZ);
  add_block(ta, fluid.Af, oS, oS);
  add_block(ta, fluid.Bf, oS, oR);

  GlobalSystem sys;
  sys.M = to_sparse(n, n, tm);
  sys.A = to_sparse(n, n, ta);
  sys.poro = std::move(poro);
  sys.fluid = std::move(fluid);
  sys.coupling = std::move(coupling);
  return sys;
}

GlobalSystem assemble_system(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec) {
  return build_global(space, assemble_poro(space, mat, spec), assemble_fluid(space, mat, spec),
                      assemble_coupling(space, mat));
}

std::map<std::string, const SpMat*> named_blocks(const GlobalSystem& s) {
  return {{"M", &s.M},
          {"A", &s.A},
          {"M_rho", &s.poro.M_rho},
          {"M_rhof", &s.poro.M_rhof},
          {"M_rhow", &s.poro.M_rhow},
          {"D_etak", &s.poro.D_etak},
          {"D_gamma", &s.poro.D_gamma},
          {"Ae", &s.poro.Ae},
          {"Bp", &s.poro.Bp},
          {"Bp_beta", &s.poro.Bp_beta},
          {"Bp_beta2", &s.poro.Bp_beta2},
          {"Mf", &s.fluid.Mf},
          {"Df", &s.fluid.Df},
          {"Af", &s.fluid.Af},
          {"Bf", &s.fluid.Bf},
          {"N", &s.coupling.N},
          {"N_alpha", &s.coupling.N_alpha},
          {"T", &s.coupling.T},
          {"Cfp_v", &s.coupling.Cfp_v},
          {"Cfp_z", &s.coupling.Cfp_z}};
}

void dump_matrices(const GlobalSystem& sys, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, m] : named_blocks(sys)) {
    std::ofstream out(dir / (name + ".coo"));
    POLYDG_THROW_IF(!out, Error, fmt::format("cannot write matrix dump in '{}'", dir.string()));
    out << fmt::format("% {} {} {} {}\n", name, m->rows(), m->cols(), m->nonZeros());
    for (int k = 0; k < m->outerSize(); ++k)
      for (SpMat::InnerIterator it(*m, k); it; ++it) out << fmt::format("{} {} {:.17g}\n", it.row(), it.col(), it.value());
  }
}

SpMat sparse_block(const SpMat& m, int r0, int c0, int nr, int nc) {
  Triplets t;
  for (int k = c0; k < c0 + nc; ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      if (it.row() >= r0 && it.row() < r0 + nr) t.emplace_back(static_cast<int>(it.row()) - r0, k - c0, it.value());
  return to_sparse(nr, nc, t);
}

}  // namespace polydg
