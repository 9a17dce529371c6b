#include "polydg/analysis.hpp"
#include "polydg/error.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace polydg;
using namespace polydg::testing;

namespace {

RegionBox box(Region r, double x0, double x1, double y0, double y1, BoundaryKind all) {
  RegionBox b;
  b.region = r;
  b.xmin = x0;
  b.xmax = x1;
  b.ymin = y0;
  b.ymax = y1;
  b.left = b.right = b.bottom = b.top = all;
  return b;
}

VecField zero_vec() {
  return exact_vector([](const Vec2&, double) { return Vec2::Zero().eval(); },
                      [](const Vec2&, double) { return Mat2::Zero().eval(); }, 0.0);
}

TenField constant_tensor(const Mat2& c) {
  return exact_tensor([c](const Vec2&, double) { return c; }, [](const Vec2&, double) { return Vec2::Zero().eval(); }, 0.0);
}

ManufacturedCase scaled(const ManufacturedCase& mc, double s) {
  ManufacturedCase out = mc;
  auto sv = [s](VectorFn f) { return VectorFn([f, s](const Vec2& x, double t) { return Vec2(s * f(x, t)); }); };
  auto st = [s](TensorFn f) { return TensorFn([f, s](const Vec2& x, double t) { return Mat2(s * f(x, t)); }); };
  out.u = sv(mc.u);
  out.w = sv(mc.w);
  out.u_t = sv(mc.u_t);
  out.w_t = sv(mc.w_t);
  out.grad_u = st(mc.grad_u);
  out.grad_w = st(mc.grad_w);
  out.Sigma = st(mc.Sigma);
  out.Sigma_t = st(mc.Sigma_t);
  out.div_Sigma = sv(mc.div_Sigma);
  const auto r = mc.r;
  out.r = [r, s](const Vec2& x, double t) { return s * r(x, t); };
  return out;
}

}  // namespace

TEST(Norms, PoroVolumeTermsOnOneCell) {
  const std::vector<RegionBox> boxes{box(Region::Poro, -1, 0, 0, 1, BoundaryKind::Neumann)};
  auto mesh = std::make_shared<PolyMesh>(generate_cartesian(boxes, 1, 1));
  const DgSpace space(mesh, 1, 1);
  PoroMaterial pm;
  pm.m = 3.0;
  const MaterialModel mat(*mesh, pm, {}, {});
  const auto w = exact_vector([](const Vec2& x, double) { return x; }, [](const Vec2&, double) { return Mat2::Identity().eval(); },
                              0.0);
  const auto e = poro_energy(space, mat, {}, zero_vec(), w, zero_vec(), zero_vec());
  EXPECT_NEAR(e.damping, 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(e.dg_p_volume, 4.0 * 3.0, 1e-13);
  EXPECT_EQ(e.dg_p_jump, 0.0);
  EXPECT_EQ(e.rate_u + e.rate_w + e.dg_e() + e.robin, 0.0);
}

TEST(Norms, IdentityStressHasNoFluidEnergyWithoutPenalizedBoundary) {
  const std::vector<RegionBox> boxes{box(Region::Fluid, 0, 1, 0, 1, BoundaryKind::Dirichlet)};
  auto mesh = std::make_shared<PolyMesh>(generate_cartesian(boxes, 2, 2));
  const DgSpace space(mesh, 2, 2);
  const MaterialModel mat(*mesh, {}, {}, {});
  EXPECT_NEAR(fluid_energy(space, mat, {}, constant_tensor(Mat2::Identity())).total(), 0.0, 1e-14);
}

TEST(Norms, IdentityStressOnNeumannSide) {
  // only the right side is penalized: chi |I n|^2 |F| = c3 p^2 / (rho_f h)
  auto b = box(Region::Fluid, 0, 1, 0, 1, BoundaryKind::Dirichlet);
  b.right = BoundaryKind::Neumann;
  const std::vector<RegionBox> boxes{b};
  auto mesh = std::make_shared<PolyMesh>(generate_cartesian(boxes, 1, 1));
  const DgSpace space(mesh, 2, 2);
  const MaterialModel mat(*mesh, {}, {2.0, 0.5}, {});
  const auto e = fluid_energy(space, mat, {}, constant_tensor(Mat2::Identity()));
  EXPECT_NEAR(e.dg_f_jump, 10.0 * 4.0 / (2.0 * std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(e.deviatoric + e.dg_f_volume + e.slip, 0.0, 1e-14);
}

TEST(Norms, ZeroFieldAndHomogeneity) {
  auto mesh = voronoi(10, 6);
  const DgSpace space(mesh, 2, 2);
  const auto mat = model(*mesh, material_preset("test2"));
  const PenaltySpec spec;
  EXPECT_EQ(energy_norm(space, mat, spec, Eigen::VectorXd::Zero(space.ndof()), NormKind::E), 0.0);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n;
  Eigen::VectorXd x(space.ndof()), y(space.ndof());
  for (int i = 0; i < space.ndof(); ++i) {
    x[i] = n(rng);
    y[i] = n(rng);
  }
  for (NormKind k : {NormKind::Ep, NormKind::Ef, NormKind::E, NormKind::dGe, NormKind::dGp, NormKind::dGf}) {
    const double nx = energy_norm(space, mat, spec, x, k);
    EXPECT_NEAR(energy_norm(space, mat, spec, -2.5 * x, k), 2.5 * nx, 1e-12 * nx);
    EXPECT_LE(energy_norm(space, mat, spec, x + y, k), nx + energy_norm(space, mat, spec, y, k) + 1e-12);
  }
  const double ep = energy_norm(space, mat, spec, x, NormKind::Ep), ef = energy_norm(space, mat, spec, x, NormKind::Ef);
  EXPECT_NEAR(energy_norm(space, mat, spec, x, NormKind::E), std::hypot(ep, ef), 1e-12 * ep);
}

TEST(Errors, ZeroAgainstZero) {
  auto mesh = cartesian(2);
  const DgSpace space(mesh, 1, 1);
  const auto mc = scaled(manufactured_case("test2"), 0.0);
  const auto mat = model(*mesh, mc.params);
  const auto e = error_vs_exact(space, mat, {}, Eigen::VectorXd::Zero(space.ndof()), mc, 0.05);
  EXPECT_EQ(e.err_Ep, 0.0);
  EXPECT_EQ(e.err_Ef, 0.0);
  EXPECT_EQ(e.err_r, 0.0);
}

TEST(Errors, HomogeneousInTheExactField) {
  auto mesh = cartesian(2);
  const DgSpace space(mesh, 1, 1);
  const auto mc = manufactured_case("test2");
  const auto mat = model(*mesh, mc.params);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(space.ndof());
  const auto a = error_vs_exact(space, mat, {}, zero, mc, 0.05);
  const auto b = error_vs_exact(space, mat, {}, zero, scaled(mc, 2.0), 0.05);
  EXPECT_NEAR(b.err_Ep, 2 * a.err_Ep, 1e-12 * a.err_Ep);
  EXPECT_NEAR(b.err_Ef, 2 * a.err_Ef, 1e-12 * a.err_Ef);
  EXPECT_NEAR(b.err_r, 2 * a.err_r, 1e-12 * a.err_r);
}

TEST(Errors, PolynomialReproduction) {
  // Test 1 fields are cubic in space: reproduced exactly from p = 3
  const auto mc = manufactured_case("test1");
  for (int p : {3, 4}) {
    auto mesh = voronoi(8, static_cast<std::uint64_t>(p));
    const DgSpace space(mesh, p, p);
    const auto mat = model(*mesh, mc.params);
    const auto e = error_vs_exact(space, mat, {}, exact_state(space, mc, 0.05), mc, 0.05);
    EXPECT_LT(e.err_Ep, 1e-9) << "p=" << p;
    EXPECT_LT(e.err_Ef, 1e-9) << "p=" << p;
  }
}

TEST(Errors, ProjectionErrorDecreasesUnderRefinement) {
  const auto mc = manufactured_case("test2");
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {1, 2, 4, 8}) {
    auto mesh = cartesian(n);
    const DgSpace space(mesh, 2, 2);
    const auto mat = model(*mesh, mc.params);
    const double e = error_vs_exact(space, mat, {}, exact_state(space, mc, 0.1), mc, 0.1).err_E();
    EXPECT_LT(e, prev) << "n=" << n;
    prev = e;
  }
}

TEST(Convergence, EocFormula) {
  EXPECT_NEAR(eoc(0.1, 0.025, 0.2, 0.1), 2.0, 1e-14);
  ConvergenceTable t;
  t.rows.push_back({.h = 0.2, .p = 1, .ndof = 10, .cells = 2, .err_Ep = 0.1, .err_Ef = 0.2});
  t.rows.push_back({.h = 0.1, .p = 1, .ndof = 40, .cells = 8, .err_Ep = 0.05, .err_Ef = 0.05});
  t.compute_eoc();
  EXPECT_TRUE(std::isnan(t.rows[0].eoc_Ep));
  EXPECT_NEAR(t.rows[1].eoc_Ep, 1.0, 1e-14);
  EXPECT_NEAR(t.rows[1].eoc_Ef, 2.0, 1e-14);
  const std::string csv = t.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "h,p,ndof,cells,err_Ep,err_Ef,eoc_Ep,eoc_Ef,err_r,err_r_mid");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Convergence, SingleRowHasNoEoc) {
  ConvergenceTable t;
  t.rows.push_back({.h = 0.2, .err_Ep = 0.1});
  t.compute_eoc();
  EXPECT_TRUE(std::isnan(t.rows[0].eoc_Ep));
}

TEST(Convergence, Test1FirstOrderSmoke) {
  const auto mc = manufactured_case("test1");
  ThetaScheme sc;
  sc.dt = 1e-2;
  const auto table = run_convergence(mc, {cartesian(2), cartesian(4), cartesian(8)}, 1, sc, {}, 0.1);
  ASSERT_EQ(table.rows.size(), 3u);
  EXPECT_GT(table.rows[2].eoc_Ep, 0.8);
  EXPECT_GT(table.rows[2].eoc_Ef, 0.8);
}

TEST(EnergyMonitor, ZeroTrajectory) {
  auto mesh = cartesian(2);
  const DgSpace space(mesh, 1, 1);
  const auto mat = model(*mesh, material_preset("test1"));
  const auto sys = assemble_system(space, mat, {});
  std::vector<SimState> traj(3);
  for (int k = 0; k < 3; ++k) traj[static_cast<std::size_t>(k)] = {0.1 * k, k, Eigen::VectorXd::Zero(space.ndof())};
  const auto rec = energy_monitor(space, mat, {}, sys, traj);
  ASSERT_EQ(rec.size(), 3u);
  for (const auto& r : rec) {
    EXPECT_EQ(r.E, 0.0);
    EXPECT_EQ(r.E_stored, 0.0);
  }
  const std::string csv = energy_csv(rec);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,E,E_p,E_f,E_stored");
}

TEST(EnergyMonitor, ConstantStateConstantSeries) {
  auto mesh = cartesian(2);
  const DgSpace space(mesh, 1, 1);
  const auto mat = model(*mesh, material_preset("test1"));
  const auto sys = assemble_system(space, mat, {});
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(space.ndof(), -1.0, 1.0);
  const auto rec = energy_monitor(space, mat, {}, sys, {{0.0, 0, x}, {0.1, 1, x}});
  EXPECT_EQ(rec[0].E, rec[1].E);
  EXPECT_EQ(rec[0].E_stored, rec[1].E_stored);
}

TEST(InfSup, PositiveOnTriangulatedMesh) {
  auto mesh = cartesian(2, true);
  const DgSpace space(mesh, 1, 2);
  const auto mat = model(*mesh, material_preset("test1"));
  const auto r = infsup_estimate(space, mat, {});
  EXPECT_GT(r.beta, 1e-3);
  EXPECT_EQ(r.n_rotation, space.size(Field::R));
}

TEST(InfSup, TranslationInvariant) {
  auto boxes = verification_boxes();
  auto shifted = boxes;
  for (auto& b : shifted) {
    b.xmin += 5;
    b.xmax += 5;
    b.ymin -= 3;
    b.ymax -= 3;
  }
  auto m0 = std::make_shared<PolyMesh>(generate_cartesian(boxes, 2, 2, true));
  auto m1 = std::make_shared<PolyMesh>(generate_cartesian(shifted, 2, 2, true));
  const DgSpace s0(m0, 1, 2), s1(m1, 1, 2);
  const auto p = material_preset("test1");
  const double b0 = infsup_estimate(s0, model(*m0, p), {}).beta, b1 = infsup_estimate(s1, model(*m1, p), {}).beta;
  EXPECT_NEAR(b0, b1, 1e-8 * b0);
}

TEST(InfSup, RefusesLargeSpaces) {
  auto mesh = cartesian(4);
  const DgSpace space(mesh, 1, 2);
  const auto mat = model(*mesh, material_preset("test1"));
  EXPECT_THROW(infsup_estimate(space, mat, {}, 100), InvalidArgument);
}

TEST(Diagnostics, Test1System) {
  auto mesh = cartesian(2);
  const DgSpace space(mesh, 2, 2);
  const auto mat = model(*mesh, material_preset("test1"));
  const auto rep = matrix_diagnostics(space, assemble_system(space, mat, {}));
  EXPECT_LT(rep.max_symmetry(), 1e-12);
  EXPECT_TRUE(rep.density_pd);
  EXPECT_LT(rep.coupling_transpose, 1e-12);
  EXPECT_GE(rep.symmetry.size(), 8u);
}

TEST(Diagnostics, SymmetryResidual) {
  SpMat m(2, 2);
  m.insert(0, 1) = 1.0;
  m.insert(1, 0) = 0.5;
  EXPECT_NEAR(symmetry_residual(m), 0.5, 1e-15);
  SpMat s(2, 2);
  s.insert(0, 0) = 2.0;
  EXPECT_EQ(symmetry_residual(s), 0.0);
}
