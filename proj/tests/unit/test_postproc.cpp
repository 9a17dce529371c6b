#include "polydg/error.hpp"
#include "polydg/postproc.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace polydg;
using namespace polydg::testing;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadSources zero_sources() {
  LoadSources s;
  s.f_p = s.g_p = s.H = [](const Vec2&, double) { return Vec2::Zero().eval(); };
  s.F_f = [](const Vec2&, double) { return Mat2::Zero().eval(); };
  return s;
}

const auto tmp = std::filesystem::temp_directory_path();

}  // namespace

TEST(Recovery, ZeroStressGivesZeroFluid) {
  auto mesh = cartesian(2);
  const DgSpace space(mesh, 1, 2);
  const auto mat = model(*mesh, material_preset("test1"));
  const Eigen::VectorXd X = Eigen::VectorXd::Zero(space.ndof());
  const auto r = recover_fluid(space, mat, X, Eigen::VectorXd::Zero(space.size(Field::S)), zero_sources(), 0.0);
  for (int K : mesh->region_cells(Region::Fluid)) {
    EXPECT_EQ(r.u_f.mean(space, K).norm(), 0.0);
    EXPECT_EQ(r.p_f.mean(space, K).norm(), 0.0);
  }
  for (int K : mesh->region_cells(Region::Poro)) EXPECT_FALSE(r.u_f.defined_on(K));
}

TEST(Recovery, Test2FluidPressureVanishes) {
  const auto mc = manufactured_case("test2");
  auto mesh = cartesian(2);
  const DgSpace space(mesh, 2, 2);
  const auto mat = model(*mesh, mc.params);
  const double t = 0.05;
  const Eigen::VectorXd X = exact_state(space, mc, t);
  const auto r = recover_fluid(space, mat, X, project_tensor(space, mc.Sigma_t, t), mc.sources, t);
  for (int K : mesh->region_cells(Region::Fluid))
    EXPECT_LT(r.p_f.eval(space, K, mesh->cell(K).centroid).norm(), 1e-14);
}

TEST(Recovery, Test1FluidVelocityAndPressure) {
  const auto mc = manufactured_case("test1");
  auto mesh = voronoi(6, 2);
  const DgSpace space(mesh, 3, 3);
  const auto mat = model(*mesh, mc.params);
  const double t = 0.08;
  const auto r = recover_fluid(space, mat, exact_state(space, mc, t), project_tensor(space, mc.Sigma_t, t), mc.sources, t);
  for (int K : mesh->region_cells(Region::Fluid)) {
    const Vec2 x = mesh->cell(K).centroid;
    EXPECT_LT((r.u_f.eval(space, K, x) - mc.u_f(x, t)).norm(), 1e-11);
    EXPECT_NEAR(r.p_f.eval(space, K, x)[0], mc.p_f(x, t), 1e-12);
  }
}

TEST(Recovery, BackwardRateNeedsTwoStates) {
  auto mesh = cartesian(1);
  const DgSpace space(mesh, 1, 1);
  SimState s{0.0, 0, Eigen::VectorXd::Zero(space.ndof())};
  EXPECT_THROW(backward_stress_rate(space, s, std::nullopt), Error);
  SimState prev = s;
  SimState cur{0.01, 1, Eigen::VectorXd::Zero(space.ndof())};
  cur.X.segment(space.offset(Field::S), space.size(Field::S)).setConstant(0.02);
  const Eigen::VectorXd rate = backward_stress_rate(space, cur, prev);
  EXPECT_NEAR(rate.maxCoeff(), 2.0, 1e-12);
  EXPECT_NEAR(rate.minCoeff(), 2.0, 1e-12);
}

TEST(PorePressure, LinearDisplacement) {
  auto mesh = cartesian(2);
  const DgSpace space(mesh, 1, 1);
  const auto mat = model(*mesh, material_preset("test1"));
  Eigen::VectorXd X = Eigen::VectorXd::Zero(space.ndof());
  set_block(space, X, Field::U, project_poro_vector(space, [](const Vec2& x, double) { return Vec2(x.x(), 0.0); }, 0.0));
  const auto p = recover_poro_pressure(space, mat, X);
  for (int K : mesh->region_cells(Region::Poro)) EXPECT_NEAR(p.mean(space, K)[0], -1.0, 1e-13);
  const auto zero = recover_poro_pressure(space, mat, Eigen::VectorXd::Zero(space.ndof()));
  for (int K : mesh->region_cells(Region::Poro)) EXPECT_EQ(zero.mean(space, K)[0], 0.0);
}

TEST(Export, EmptySnapshotIsGeometryOnly) {
  auto mesh = voronoi(5, 1);
  const DgSpace space(mesh, 1, 1);
  const auto path = tmp / "polydg_empty.vtk";
  export_vtk(FieldSnapshot{}, space, path);
  const std::string text = slurp(path);
  EXPECT_EQ(text.rfind("# vtk DataFile Version 3.0", 0), 0u);
  EXPECT_NE(text.find("DATASET UNSTRUCTURED_GRID"), std::string::npos);
  EXPECT_NE(text.find("CELLS " + std::to_string(mesh->num_cells()) + " "), std::string::npos);
  EXPECT_NE(text.find("CELL_TYPES " + std::to_string(mesh->num_cells())), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Export, SnapshotFieldsAndProfiles) {
  const auto mc = manufactured_case("test2");
  auto mesh = cartesian(2);
  const DgSpace space(mesh, 2, 2);
  const auto mat = model(*mesh, mc.params);
  const SimState prev{0.04, 4, exact_state(space, mc, 0.04)};
  const SimState cur{0.05, 5, exact_state(space, mc, 0.05)};
  const auto snap = make_snapshot(space, mat, cur, prev, mc.sources);
  for (const char* f : {"u_p", "w_p", "v_p", "z_p", "Sigma_f", "u_f", "p_f", "p_p"}) EXPECT_TRUE(snap.fields.count(f)) << f;
  EXPECT_FALSE(snap.fields.at("p_p").defined_on(mesh->region_cells(Region::Fluid)[0]));
  EXPECT_FALSE(snap.fields.at("p_f").defined_on(mesh->region_cells(Region::Poro)[0]));
  const auto vtk = tmp / "polydg_snap.vtk";
  export_vtk(snap, space, vtk);
  const std::string text = slurp(vtk);
  EXPECT_NE(text.find("CELL_DATA"), std::string::npos);
  EXPECT_NE(text.find("POINT_DATA"), std::string::npos);
  EXPECT_NE(text.find("p_p"), std::string::npos);
  const auto csv = tmp / "polydg_profiles.csv";
  export_csv_profiles(snap, space, {{"mid", Vec2(-1, 0.5), Vec2(1, 0.5), 11}}, csv);
  const std::string prof = slurp(csv);
  EXPECT_EQ(prof.find('\n') > 0, true);
  EXPECT_NE(prof.substr(0, prof.find('\n')).find("line"), std::string::npos);
  EXPECT_THROW(export_vtk(snap, space, "/nonexistent-dir/x.vtk"), Error);
  std::filesystem::remove(vtk);
  std::filesystem::remove(csv);
}

TEST(Interface, ExactStateHasContinuousFlux) {
  const auto mc = manufactured_case("test1");
  auto mesh = cartesian(2);
  const DgSpace space(mesh, 3, 3);
  const auto mat = model(*mesh, mc.params);
  const double t = 0.06;
  const auto flux = interface_flux(space, mat, exact_state(space, mc, t), mc.sources, t);
  ASSERT_FALSE(flux.s.empty());
  EXPECT_LT(flux.mismatch_l2, 1e-10);
  EXPECT_TRUE(std::is_sorted(flux.s.begin(), flux.s.end()));
  EXPECT_NEAR(flux.length, 1.0, 1e-14);
}

TEST(Interface, PartialMismatchAddsUp) {
  const auto mc = manufactured_case("test2");
  auto mesh = voronoi(6, 4);
  const DgSpace space(mesh, 1, 1);
  const auto mat = model(*mesh, mc.params);
  Eigen::VectorXd X = exact_state(space, mc, 0.1);
  X.segment(space.offset(Field::V), space.size(Field::V)) *= 1.5;
  const auto flux = interface_flux(space, mat, X, mc.sources, 0.1);
  ASSERT_GT(flux.mismatch_l2, 1e-3);
  const double a = flux.mismatch_l2_on(0.0, 0.3), b = flux.mismatch_l2_on(0.3 + 1e-15, 1.0);
  EXPECT_NEAR(a * a + b * b, flux.mismatch_l2 * flux.mismatch_l2, 1e-12);
  EXPECT_EQ(flux.mismatch_l2_on(2.0, 3.0), 0.0);
  const auto path = tmp / "polydg_iface.csv";
  export_interface_csv(flux, path);
  const std::string text = slurp(path);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(flux.s.size()) + 1);
  std::filesystem::remove(path);
}

TEST(Checkerboard, Metrics) {
  const std::vector<RegionBox> boxes{verification_boxes()[0]};
  auto mesh = std::make_shared<PolyMesh>(generate_cartesian(boxes, 4, 4));
  const DgSpace space(mesh, 1, 1);
  CellField p;
  p.region = Region::Poro;
  p.coeff.resize(static_cast<std::size_t>(mesh->num_cells()));
  for (int K = 0; K < mesh->num_cells(); ++K) {
    const Vec2 c = mesh->cell(K).centroid;
    const int parity = (static_cast<int>(std::floor(c.x() * 4)) + static_cast<int>(std::floor(c.y() * 4))) & 1;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(space.dim(Region::Poro), 1);
    m(0, 0) = (parity ? 1.0 : -1.0) * std::sqrt(mesh->cell(K).area);
    p.coeff[static_cast<std::size_t>(K)] = m;
  }
  const auto rep = pressure_checkerboard(space, p);
  EXPECT_NEAR(rep.range, 2.0, 1e-12);
  EXPECT_NEAR(rep.max_neighbor_jump, 2.0, 1e-12);
  EXPECT_NEAR(rep.max_abs, 1.0, 1e-12);
}

TEST(Locate, FindsCells) {
  auto mesh = cartesian(2);
  EXPECT_EQ(mesh->cell(locate_cell(*mesh, Vec2(-0.25, 0.25))).region, Region::Poro);
  EXPECT_EQ(mesh->cell(locate_cell(*mesh, Vec2(0.75, 0.75))).region, Region::Fluid);
  EXPECT_EQ(locate_cell(*mesh, Vec2(3, 3)), -1);
}
