#include "polydg/sources.hpp"

#include "polydg/error.hpp"
#include "polydg/parallel.hpp"

#include <fmt/format.h>

#include <cmath>

namespace polydg {

void LoadSources::validate() const {
  POLYDG_THROW_IF(!f_p, ConfigError, "load sources: missing f_p");
  POLYDG_THROW_IF(!g_p, ConfigError, "load sources: missing g_p");
  if (H) {
    POLYDG_THROW_IF(!F_f, ConfigError, "load sources: H given without F_f");
  } else {
    POLYDG_THROW_IF(!h_f, ConfigError, "load sources: missing F_f/H or h_f");
    POLYDG_THROW_IF(!u_f0, ConfigError, "load sources: missing u_f0");
    POLYDG_THROW_IF(!(h_dt > 0.0), ConfigError, "load sources: h_f route needs a positive time grid step");
  }
}

Vec2 LoadSources::eval_H(const Vec2& x, double t) const {
  if (H) return H(x, t);
  Vec2 acc = u_f0(x, 0.0);
  const int n = static_cast<int>(std::floor(t / h_dt + 1e-9));
  double t0 = 0.0;
  Vec2 f0 = h_f(x, 0.0);
  for (int k = 1; k <= n; ++k) {
    const double t1 = k * h_dt;
    const Vec2 f1 = h_f(x, t1);
    acc += 0.5 * (t1 - t0) * (f0 + f1);
    t0 = t1;
    f0 = f1;
  }
  if (t - t0 > 1e-12 * std::max(1.0, t)) acc += 0.5 * (t - t0) * (f0 + h_f(x, t));
  return acc;
}

namespace {

constexpr int kBatch = 64;

using Vec = Eigen::VectorXd;

Vec2 tangent(const Vec2& n) { return rotate_minus_90(n); }

/// sigma_e(e_c phi) n for the two components of a p-side vector basis function.
Vec2 elastic_traction(int comp, double px, double py, const Vec2& n, double lam, double mu) {
  if (comp == 0) return {(2 * mu + lam) * px * n.x() + mu * py * n.y(), mu * py * n.x() + lam * px * n.y()};
  return {lam * py * n.x() + mu * px * n.y(), mu * px * n.x() + (2 * mu + lam) * py * n.y()};
}

/// Per-batch sparse contributions accumulated into a dense vector.
using Contribution = std::vector<std::pair<int, double>>;

Vec gather(int n, const std::vector<Contribution>& parts) {
  Vec out = Vec::Zero(n);
  for (const auto& p : parts)
    for (const auto& [i, v] : p) out(i) += v;
  return out;
}

void fluid_boundary_form(const DgSpace& space, const LoadSources& src, double t, FluidLoadForm form,
                         std::vector<Contribution>& parts) {
  const auto& mesh = space.mesh();
  const int d = space.dim(Region::Fluid);
  const int oS = space.offset(Field::S);
  const auto& fcells = mesh.region_cells(Region::Fluid);

  auto cell_parts = batched_map<Contribution>(static_cast<int>(fcells.size()), kBatch, [&](int b, int e) {
    Contribution out;
    for (int k = b; k < e; ++k) {
      const int K = fcells[static_cast<std::size_t>(k)];
      const auto& tab = space.cell_table(K);
      const int s0 = oS + space.cell_start(Field::S, K);
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(4 * d);
      for (std::size_t q = 0; q < tab.rule.size(); ++q) {
        const Vec2& x = tab.rule.points[q];
        const double w = tab.rule.weights[q];
        const auto qi = static_cast<Eigen::Index>(q);
        if (form == FluidLoadForm::Boundary) {
          if (!src.F_f) continue;
          const Mat2 F = src.F_f(x, t);
          for (int c = 0; c < 4; ++c) acc.segment(c * d, d) += (w * F(c / 2, c % 2)) * tab.phi.row(qi).transpose();
        } else {
          // -(H, div tau): (div tau)_i for component (i, j) is d_j phi.
          const Vec2 H = src.eval_H(x, t);
          for (int c = 0; c < 4; ++c) {
            const int i = c / 2, j = c % 2;
            acc.segment(c * d, d) -= (w * H(i)) * (j == 0 ? tab.dx.row(qi) : tab.dy.row(qi)).transpose();
          }
        }
      }
      for (int i = 0; i < 4 * d; ++i) out.emplace_back(s0 + i, acc(i));
    }
    return out;
  });
  parts.insert(parts.end(), cell_parts.begin(), cell_parts.end());

  std::vector<int> faces;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto tag = mesh.face(f).tag;
    if (tag == FaceTag::Interface || tag == FaceTag::DirichletF ||
        (form == FluidLoadForm::Volume && (tag == FaceTag::InteriorF || tag == FaceTag::NeumannF)))
      faces.push_back(f);
  }
  auto face_parts = batched_map<Contribution>(static_cast<int>(faces.size()), kBatch, [&](int b, int e) {
    Contribution out;
    for (int k = b; k < e; ++k) {
      const int fi = faces[static_cast<std::size_t>(k)];
      const Face& f = mesh.face(fi);
      const auto& rule = space.face_rule(fi);
      // Fluid sides with the outward fluid normal (sign) of each side.
      std::vector<std::pair<int, double>> sides;
      if (f.tag == FaceTag::Interface) {
        sides.emplace_back(1, -1.0);
      } else {
        sides.emplace_back(0, 1.0);
        if (!f.is_boundary()) sides.emplace_back(1, -1.0);
      }
      for (auto [s, sgn] : sides) {
        const int K = f.cells[static_cast<std::size_t>(s)];
        const auto& tab = space.face_table(fi, s);
        const Vec2 nf = sgn * f.normal;
        const int s0 = oS + space.cell_start(Field::S, K);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(4 * d);
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const Vec2& x = rule.points[q];
          Vec2 g = Vec2::Zero();
          if (form == FluidLoadForm::Boundary) {
            // <G_f, tau n_f> with G_f = g_D - H (g_D = 0 on the interface)
            if (f.tag == FaceTag::DirichletF && src.g_fD) g += src.g_fD(x, t);
            g -= src.eval_H(x, t);
          } else if (f.tag == FaceTag::DirichletF) {
            if (src.g_fD) g = src.g_fD(x, t);
          } else if (f.tag == FaceTag::Interface) {
            continue;
          } else {
            // interior f faces and the fluid Neumann boundary: <H, tau n_K>
            g = src.eval_H(x, t);
          }
          const double w = rule.weights[q];
          for (int c = 0; c < 4; ++c)
            acc.segment(c * d, d) += (w * g(c / 2) * nf(c % 2)) * tab.phi.row(static_cast<Eigen::Index>(q)).transpose();
        }
        for (int i = 0; i < 4 * d; ++i) out.emplace_back(s0 + i, acc(i));
      }
    }
    return out;
  });
  parts.insert(parts.end(), face_parts.begin(), face_parts.end());
}

}  // namespace

Eigen::VectorXd assemble_fluid_load(const DgSpace& space, const LoadSources& src, double t, FluidLoadForm form) {
  std::vector<Contribution> parts;
  fluid_boundary_form(space, src, t, form, parts);
  return gather(space.ndof(), parts).segment(space.offset(Field::S), space.size(Field::S));
}

Eigen::VectorXd assemble_load(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec,
                              const LoadSources& src, double t) {
  src.validate();
  const auto& mesh = space.mesh();
  const int d = space.dim(Region::Poro);
  const int df = space.dim(Region::Fluid);
  const int oV = space.offset(Field::V), oZ = space.offset(Field::Z), oS = space.offset(Field::S);
  std::vector<Contribution> parts;

  const auto& pcells = mesh.region_cells(Region::Poro);
  auto cell_parts = batched_map<Contribution>(static_cast<int>(pcells.size()), kBatch, [&](int b, int e) {
    Contribution out;
    for (int k = b; k < e; ++k) {
      const int K = pcells[static_cast<std::size_t>(k)];
      const auto& tab = space.cell_table(K);
      const int c0 = space.cell_start(Field::V, K);
      Eigen::VectorXd fv = Eigen::VectorXd::Zero(2 * d), gz = Eigen::VectorXd::Zero(2 * d);
      for (std::size_t q = 0; q < tab.rule.size(); ++q) {
        const Vec2& x = tab.rule.points[q];
        const double w = tab.rule.weights[q];
        const Vec2 f = src.f_p(x, t), g = src.g_p(x, t);
        const auto phi = tab.phi.row(static_cast<Eigen::Index>(q)).transpose();
        for (int c = 0; c < 2; ++c) {
          fv.segment(c * d, d) += (w * f(c)) * phi;
          gz.segment(c * d, d) += (w * g(c)) * phi;
        }
      }
      for (int i = 0; i < 2 * d; ++i) {
        out.emplace_back(oV + c0 + i, fv(i));
        out.emplace_back(oZ + c0 + i, gz(i));
      }
    }
    return out;
  });
  parts.insert(parts.end(), cell_parts.begin(), cell_parts.end());

  std::vector<int> faces;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto tag = mesh.face(f).tag;
    if (tag == FaceTag::DirichletP || tag == FaceTag::NeumannP || tag == FaceTag::Interface || tag == FaceTag::NeumannF)
      faces.push_back(f);
  }
  const auto& ip = mat.interface();
  auto face_parts = batched_map<Contribution>(static_cast<int>(faces.size()), kBatch, [&](int b, int e) {
    Contribution out;
    for (int k = b; k < e; ++k) {
      const int fi = faces[static_cast<std::size_t>(k)];
      const Face& f = mesh.face(fi);
      const Vec2 n = f.normal, tp = tangent(n);
      const auto& rule = space.face_rule(fi);
      if (f.tag == FaceTag::NeumannF) {
        if (!src.Sigma_N) continue;
        const int K = f.cells[0];
        const double rinv = 1.0 / mat.fluid(K).rho_f;
        const double chi = penalty_chi(space, mat, spec, fi, PenaltyKind::Fluid);
        const auto& tab = space.face_table(fi, 0);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(4 * df);
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const auto qi = static_cast<Eigen::Index>(q);
          const Vec2 g = src.Sigma_N(rule.points[q], t) * n;
          const double w = rule.weights[q];
          for (int c = 0; c < 4; ++c) {
            const int i = c / 2, j = c % 2;
            // -<g, rho^-1 div tau> + <chi g, tau n>
            const auto grad = j == 0 ? tab.dx.row(qi) : tab.dy.row(qi);
            acc.segment(c * df, df) += (-w * g(i) * rinv) * grad.transpose() + (w * chi * g(i) * n(j)) * tab.phi.row(qi).transpose();
          }
        }
        const int s0 = oS + space.cell_start(Field::S, K);
        for (int i = 0; i < 4 * df; ++i) out.emplace_back(s0 + i, acc(i));
        continue;
      }
      const int K = f.cells[0];
      const auto& m = mat.poro(K);
      const auto& tab = space.face_table(fi, 0);
      Eigen::VectorXd fv = Eigen::VectorXd::Zero(2 * d), gz = Eigen::VectorXd::Zero(2 * d);
      if (f.tag == FaceTag::DirichletP) {
        const double chi_e = penalty_chi(space, mat, spec, fi, PenaltyKind::Elastic);
        const double chi_p = penalty_chi(space, mat, spec, fi, PenaltyKind::Pressure);
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const auto qi = static_cast<Eigen::Index>(q);
          const Vec2& x = rule.points[q];
          const double w = rule.weights[q];
          const Vec2 uD = src.u_pD ? src.u_pD(x, t) : Vec2::Zero();
          const Vec2 wD = src.w_pD ? src.w_pD(x, t) : Vec2::Zero();
          const double qD = (m.beta * uD + wD).dot(n);
          for (int a = 0; a < d; ++a) {
            const double ph = tab.phi(qi, a), px = tab.dx(qi, a), py = tab.dy(qi, a);
            for (int c = 0; c < 2; ++c) {
              const Vec2 tr = elastic_traction(c, px, py, n, m.lambda, m.mu);
              const double divv = c == 0 ? px : py;
              fv(c * d + a) += w * (-uD.dot(tr) + chi_e * uD(c) * ph - qD * m.m * m.beta * divv + chi_p * qD * m.beta * ph * n(c));
              gz(c * d + a) += w * (-qD * m.m * divv + chi_p * qD * ph * n(c));
            }
          }
        }
      } else if (f.tag == FaceTag::NeumannP) {
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const auto qi = static_cast<Eigen::Index>(q);
          const Vec2& x = rule.points[q];
          const double w = rule.weights[q];
          const Vec2 trac = src.sigma_pN ? Vec2(src.sigma_pN(x, t) * n) : Vec2::Zero();
          const double pN = src.p_pN ? src.p_pN(x, t) : 0.0;
          for (int c = 0; c < 2; ++c) {
            fv.segment(c * d, d) += (w * trac(c)) * tab.phi.row(qi).transpose();
            gz.segment(c * d, d) += (-w * pN * n(c)) * tab.phi.row(qi).transpose();
          }
        }
      } else {  // interface extras
        const auto& tf = space.face_table(fi, 1);
        const int L = f.cells[1];
        Eigen::VectorXd ts = Eigen::VectorXd::Zero(4 * df);
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const auto qi = static_cast<Eigen::Index>(q);
          const Vec2& x = rule.points[q];
          const double w = rule.weights[q];
          double fI[5];
          for (int i = 0; i < 5; ++i) fI[i] = src.f_I[static_cast<std::size_t>(i)] ? src.f_I[static_cast<std::size_t>(i)](x, t) : 0.0;
          for (int c = 0; c < 2; ++c) {
            fv.segment(c * d, d) += (w * (fI[2] * n(c) + fI[3] * tp(c))) * tab.phi.row(qi).transpose();
            gz.segment(c * d, d) += (-w * fI[1] * n(c)) * tab.phi.row(qi).transpose();
          }
          for (int c = 0; c < 4; ++c) {
            const int i = c / 2, j = c % 2;
            const double tnn = n(i) * n(j), tnt = tp(i) * n(j);
            ts.segment(c * df, df) += (-w * (fI[0] * tnn + fI[4] / ip.delta * tnt)) * tf.phi.row(qi).transpose();
          }
        }
        const int s0 = oS + space.cell_start(Field::S, L);
        for (int i = 0; i < 4 * df; ++i) out.emplace_back(s0 + i, ts(i));
      }
      const int c0 = space.cell_start(Field::V, K);
      for (int i = 0; i < 2 * d; ++i) {
        out.emplace_back(oV + c0 + i, fv(i));
        out.emplace_back(oZ + c0 + i, gz(i));
      }
    }
    return out;
  });
  parts.insert(parts.end(), face_parts.begin(), face_parts.end());

  fluid_boundary_form(space, src, t, src.has_closed_form_H() ? FluidLoadForm::Boundary : FluidLoadForm::Volume, parts);
  return gather(space.ndof(), parts);
}

}  // namespace polydg
