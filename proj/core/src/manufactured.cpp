#include "polydg/manufactured.hpp"

#include "polydg/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

namespace polydg {

namespace {

Mat2 mat(double a, double b, double c, double d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

void finish_sources(ManufacturedCase& mc) {
  auto& s = mc.sources;
  s.g_fD = mc.u_f;
  s.u_pD = mc.u;
  s.w_pD = mc.w;
  // Copies so the closures outlive the case object.
  s.sigma_pN = [gu = mc.grad_u, gw = mc.grad_w, m = mc.params.poro](const Vec2& x, double t) {
    const Mat2 g = gu(x, t);
    const double p = pore_pressure(g.trace(), gw(x, t).trace(), m.m, m.beta);
    return (elastic_stress(0.5 * (g + g.transpose()), m.lambda, m.mu) - m.beta * p * Mat2::Identity()).eval();
  };
  s.p_pN = [gu = mc.grad_u, gw = mc.grad_w, m = mc.params.poro](const Vec2& x, double t) {
    return pore_pressure(gu(x, t).trace(), gw(x, t).trace(), m.m, m.beta);
  };
  s.Sigma_N = mc.Sigma;
}

ManufacturedCase make_test1() {
  ManufacturedCase mc;
  mc.name = "test1";
  mc.params = material_preset("test1");
  mc.boxes = verification_boxes();
  mc.T = 0.1;
  mc.dt = 1e-3;
  mc.u = [](const Vec2& p, double t) { const double x = p.x(), y = p.y(); return Vec2(x * t * t / 4, t * x * x * y / 2 - y * t * t * t / 6); };
  mc.w = [](const Vec2& p, double t) { const double x = p.x(), y = p.y(); return Vec2(-t * x * y * y / 2 + x * t * t * t / 6, y * t * t / 4); };
  mc.u_t = [](const Vec2& p, double t) { const double x = p.x(), y = p.y(); return Vec2(x * t / 2, x * x * y / 2 - y * t * t / 2); };
  mc.w_t = [](const Vec2& p, double t) { const double x = p.x(), y = p.y(); return Vec2(-x * y * y / 2 + x * t * t / 2, y * t / 2); };
  mc.grad_u = [](const Vec2& p, double t) { const double x = p.x(), y = p.y(); return mat(t * t / 4, 0, t * x * y, t * x * x / 2 - t * t * t / 6); };
  mc.grad_w = [](const Vec2& p, double t) { const double x = p.x(), y = p.y(); return mat(-t * y * y / 2 + t * t * t / 6, -t * x * y, 0, t * t / 4); };
  mc.Sigma = [](const Vec2& p, double t) {
    const double q = t * t * (p.y() * p.y() - p.x() * p.x()) / 4;
    return mat(t * t * t / 6 - q, 0, 0, -t * t * t / 6 - q);
  };
  mc.Sigma_t = [](const Vec2& p, double t) {
    const double q = t * (p.y() * p.y() - p.x() * p.x()) / 2;
    return mat(t * t / 2 - q, 0, 0, -t * t / 2 - q);
  };
  mc.div_Sigma = [](const Vec2& p, double t) { return Vec2(t * t * p.x() / 2, -t * t * p.y() / 2); };
  mc.r = [](const Vec2&, double) { return 0.0; };
  mc.u_f = [](const Vec2& p, double t) { return Vec2(t * t * p.x() / 2, -t * t * p.y() / 2); };
  mc.p_f = [](const Vec2& p, double t) { return t * (p.y() * p.y() - p.x() * p.x()) / 2; };

  auto& s = mc.sources;
  s.f_p = [](const Vec2& p, double t) { return Vec2(p.x() * (1 - 4 * t) / 2, p.y() * (0.5 - t)); };
  s.g_p = [](const Vec2& p, double t) {
    const double x = p.x(), y = p.y();
    return Vec2(x * (t * t + 2 * t - y * y + 1) / 2, y * (t + 2) / 2);
  };
  s.F_f = [](const Vec2&, double) { return Mat2::Zero().eval(); };
  s.H = [](const Vec2&, double) { return Vec2::Zero().eval(); };
  s.f_I[2] = [](const Vec2&, double t) { return -t * t * t / 6 + 0.75 * t * t; };
  finish_sources(mc);
  return mc;
}

ManufacturedCase make_test2() {
  ManufacturedCase mc;
  mc.name = "test2";
  mc.params = material_preset("test2");
  mc.boxes = verification_boxes();
  mc.T = 0.1;
  mc.dt = 1e-3;
  mc.u = [](const Vec2& p, double t) { const double s = std::exp(-t) * std::sin(p.x() - p.y()); return Vec2(s, s); };
  mc.w = [](const Vec2& p, double t) { const double s = -std::exp(-t) * std::sin(p.x() - p.y()); return Vec2(s, s); };
  mc.u_t = [](const Vec2& p, double t) { const double s = -std::exp(-t) * std::sin(p.x() - p.y()); return Vec2(s, s); };
  mc.w_t = [](const Vec2& p, double t) { const double s = std::exp(-t) * std::sin(p.x() - p.y()); return Vec2(s, s); };
  mc.grad_u = [](const Vec2& p, double t) { const double c = std::exp(-t) * std::cos(p.x() - p.y()); return mat(c, -c, c, -c); };
  mc.grad_w = [](const Vec2& p, double t) { const double c = -std::exp(-t) * std::cos(p.x() - p.y()); return mat(c, -c, c, -c); };
  mc.Sigma = [](const Vec2& p, double t) { const double c = (std::exp(-t) - 1) * std::cos(p.x() - p.y()); return mat(c, 0, 0, -c); };
  mc.Sigma_t = [](const Vec2& p, double t) { const double c = -std::exp(-t) * std::cos(p.x() - p.y()); return mat(c, 0, 0, -c); };
  mc.div_Sigma = [](const Vec2& p, double t) { const double s = -(std::exp(-t) - 1) * std::sin(p.x() - p.y()); return Vec2(s, s); };
  mc.r = [](const Vec2& p, double t) { return std::exp(-t) * std::cos(p.x() - p.y()); };
  mc.u_f = [](const Vec2& p, double t) { const double s = -std::exp(-t) * std::sin(p.x() - p.y()); return Vec2(s, s); };
  mc.p_f = [](const Vec2&, double) { return 0.0; };

  auto& s = mc.sources;
  s.f_p = [](const Vec2& p, double t) { const double v = std::exp(-t) * std::sin(p.x() - p.y()); return Vec2(v, v); };
  s.g_p = [](const Vec2&, double) { return Vec2::Zero().eval(); };
  s.F_f = [](const Vec2& p, double) { const double c = std::cos(p.x() - p.y()); return mat(-c, c, -c, c); };
  s.H = [](const Vec2& p, double) { const double v = -std::sin(p.x() - p.y()); return Vec2(v, v); };
  s.f_I[1] = [](const Vec2& p, double t) { return -std::exp(-t) * std::cos(p.y()); };
  s.f_I[2] = [](const Vec2& p, double t) { return 3 * std::exp(-t) * std::cos(p.y()); };
  finish_sources(mc);
  return mc;
}

}  // namespace

std::vector<RegionBox> verification_boxes() {
  RegionBox p;
  p.region = Region::Poro;
  p.xmin = -1.0;
  p.xmax = 0.0;
  p.left = BoundaryKind::Dirichlet;
  p.bottom = BoundaryKind::Dirichlet;
  p.top = BoundaryKind::Neumann;
  RegionBox f;
  f.region = Region::Fluid;
  f.xmin = 0.0;
  f.xmax = 1.0;
  f.right = BoundaryKind::Neumann;
  f.bottom = BoundaryKind::Dirichlet;
  f.top = BoundaryKind::Dirichlet;
  return {p, f};
}

Mat2 ManufacturedCase::sigma_p(const Vec2& x, double t) const {
  const auto& m = params.poro;
  const Mat2 gu = grad_u(x, t);
  const Mat2 eps = 0.5 * (gu + gu.transpose());
  return elastic_stress(eps, m.lambda, m.mu) - m.beta * p_p(x, t) * Mat2::Identity();
}

double ManufacturedCase::p_p(const Vec2& x, double t) const {
  const auto& m = params.poro;
  return pore_pressure(grad_u(x, t).trace(), grad_w(x, t).trace(), m.m, m.beta);
}

InitialData ManufacturedCase::initial(double t0) const {
  InitialData d;
  d.u0 = [f = u, t0](const Vec2& x, double) { return f(x, t0); };
  d.w0 = [f = w, t0](const Vec2& x, double) { return f(x, t0); };
  d.v0 = [f = u_t, t0](const Vec2& x, double) { return f(x, t0); };
  d.z0 = [f = w_t, t0](const Vec2& x, double) { return f(x, t0); };
  return d;
}

ManufacturedCase manufactured_case(std::string_view name) {
  if (name == "test1") return make_test1();
  if (name == "test2") return make_test2();
  throw ConfigError(fmt::format("unknown manufactured case '{}' (expected test1 or test2)", name));
}

double OracleReport::max() const {
  double m = std::max({biot_momentum, biot_filtration, stokes_momentum, stokes_symmetry, velocity_rewrite, fluid_stress});
  for (double v : interface) m = std::max(m, v);
  return m;
}

namespace {

// Central-difference helpers built only on the closed-form u, w, Sigma, u_f (never on the hand-coded gradients).
constexpr double kH = 2e-4;

template <class F>
auto d_dt(const F& f, const Vec2& x, double t) {
  return ((f(x, t + kH) - f(x, t - kH)) / (2 * kH)).eval();
}

template <class F>
auto d2_dt2(const F& f, const Vec2& x, double t) {
  return ((f(x, t + kH) - 2 * f(x, t) + f(x, t - kH)) / (kH * kH)).eval();
}

Mat2 fd_grad(const VectorFn& f, const Vec2& x, double t) {
  const Vec2 ex(kH, 0), ey(0, kH);
  Mat2 g;
  g.col(0) = (f(x + ex, t) - f(x - ex, t)) / (2 * kH);
  g.col(1) = (f(x + ey, t) - f(x - ey, t)) / (2 * kH);
  return g;
}

template <class F>
Vec2 fd_div_tensor(const F& T, const Vec2& x, double t) {
  const Vec2 ex(kH, 0), ey(0, kH);
  const Mat2 dx = (T(x + ex, t) - T(x - ex, t)) / (2 * kH);
  const Mat2 dy = (T(x + ey, t) - T(x - ey, t)) / (2 * kH);
  return dx.col(0) + dy.col(1);
}

template <class F>
Vec2 fd_grad_scalar(const F& s, const Vec2& x, double t) {
  const Vec2 ex(kH, 0), ey(0, kH);
  return Vec2((s(x + ex, t) - s(x - ex, t)) / (2 * kH), (s(x + ey, t) - s(x - ey, t)) / (2 * kH));
}

double fd_div(const VectorFn& f, const Vec2& x, double t) { return fd_grad(f, x, t).trace(); }

}  // namespace

OracleReport residual_oracle(const ManufacturedCase& mc, int samples, std::uint64_t seed) {
  const auto& pm = mc.params.poro;
  const auto& fm = mc.params.fluid;
  const auto& ip = mc.params.iface;
  const auto& src = mc.sources;
  const RegionBox& bp = mc.boxes[0];
  const RegionBox& bf = mc.boxes[1];
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double margin = 4 * kH;
  auto sample = [&](const RegionBox& b) {
    return Vec2(b.xmin + margin + (b.xmax - b.xmin - 2 * margin) * unit(rng),
                b.ymin + margin + (b.ymax - b.ymin - 2 * margin) * unit(rng));
  };

  auto pp = [&](const Vec2& x, double t) {
    return pore_pressure(fd_div(mc.u, x, t), fd_div(mc.w, x, t), pm.m, pm.beta);
  };
  auto sigp = [&](const Vec2& x, double t) {
    const Mat2 g = fd_grad(mc.u, x, t);
    return (elastic_stress(0.5 * (g + g.transpose()), pm.lambda, pm.mu) - pm.beta * pp(x, t) * Mat2::Identity()).eval();
  };
  auto divS = [&](const Vec2& x, double t) { return fd_div_tensor(mc.Sigma, x, t); };

  OracleReport rep;
  auto upd = [](double& slot, double v) { slot = std::max(slot, std::abs(v)); };
  for (int k = 0; k < samples; ++k) {
    const double t = margin + (mc.T - margin) * unit(rng);
    {
      const Vec2 x = sample(bp);
      const Vec2 utt = d2_dt2(mc.u, x, t), wtt = d2_dt2(mc.w, x, t), wt = d_dt(mc.w, x, t);
      const Vec2 r1 = pm.rho() * utt + pm.rho_f * wtt - fd_div_tensor(sigp, x, t) - src.f_p(x, t);
      const Vec2 r2 = pm.rho_f * utt + pm.rho_w() * wtt + pm.eta_k() * wt + fd_grad_scalar(pp, x, t) - src.g_p(x, t);
      upd(rep.biot_momentum, r1.lpNorm<Eigen::Infinity>());
      upd(rep.biot_filtration, r2.lpNorm<Eigen::Infinity>());
    }
    {
      const Vec2 x = sample(bf);
      const Mat2 St = d_dt(mc.Sigma, x, t);
      const Mat2 devSt = St - 0.5 * St.trace() * Mat2::Identity();
      // grad of the vector rho^-1 div Sigma: (i, j) = d_j (div Sigma)_i
      const Vec2 ex(kH, 0), ey(0, kH);
      Mat2 gdiv;
      gdiv.col(0) = (divS(x + ex, t) - divS(x - ex, t)) / (2 * kH * fm.rho_f);
      gdiv.col(1) = (divS(x + ey, t) - divS(x - ey, t)) / (2 * kH * fm.rho_f);
      const Mat2 gu = fd_grad(mc.u_f, x, t);
      const Mat2 rot = 0.5 * (gu - gu.transpose());
      Mat2 r;
      r << 0, mc.r(x, t), -mc.r(x, t), 0;
      upd(rep.stokes_momentum, (devSt / (2 * fm.mu_f) - gdiv + r - src.F_f(x, t)).lpNorm<Eigen::Infinity>());
      upd(rep.stokes_momentum, (rot - r).lpNorm<Eigen::Infinity>());
      upd(rep.stokes_symmetry, 0.5 * (St(0, 1) - St(1, 0)));
      upd(rep.velocity_rewrite, (mc.u_f(x, t) - divS(x, t) / fm.rho_f - src.eval_H(x, t)).lpNorm<Eigen::Infinity>());
      const Mat2 sf = 2 * fm.mu_f * 0.5 * (gu + gu.transpose()) - mc.p_f(x, t) * Mat2::Identity();
      upd(rep.fluid_stress, (St - sf).lpNorm<Eigen::Infinity>());
    }
    {
      // interface x = xmax of the p box, n_p = (1, 0)
      const Vec2 x(bp.xmax, bp.ymin + (bp.ymax - bp.ymin) * unit(rng));
      const Vec2 n(1.0, 0.0), tp = rotate_minus_90(n);
      const Vec2 ut = d_dt(mc.u, x, t), wt = d_dt(mc.w, x, t);
      const Mat2 St = d_dt(mc.Sigma, x, t);
      const Vec2 Sn = St * n, sn = sigp(x, t) * n;
      const Vec2 uf = mc.u_f(x, t);
      auto fI = [&](int i) { return src.f_I[static_cast<std::size_t>(i)] ? src.f_I[static_cast<std::size_t>(i)](x, t) : 0.0; };
      upd(rep.interface[0], (ip.alpha * ut + wt).dot(n) - uf.dot(n) + fI(0));
      upd(rep.interface[1], Sn.dot(n) - (ip.gamma * wt.dot(n) - pp(x, t)) - fI(1));
      upd(rep.interface[2], ip.alpha * Sn.dot(n) - sn.dot(n) + fI(2));
      upd(rep.interface[3], Sn.dot(tp) - sn.dot(tp) + fI(3));
      upd(rep.interface[4], Sn.dot(tp) - ip.delta * (uf - ut).dot(tp) + fI(4));
    }
  }
  return rep;
}

}  // namespace polydg
