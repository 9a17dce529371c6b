#include "polydg/error.hpp"
#include "polydg/manufactured.hpp"
#include "polydg/material.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <random>

using namespace polydg;

namespace {

// Mandel-notation stiffness on symmetric 2x2 tensors; eigen-decomposed independently of the library
double mandel_norm(double lambda, double mu) {
  Eigen::Matrix3d C;
  C << lambda + 2 * mu, lambda, 0, lambda, lambda + 2 * mu, 0, 0, 0, 2 * mu;
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(C).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Material, ElasticStress) {
  EXPECT_LT((elastic_stress(Mat2::Identity(), 1, 1) - 4 * Mat2::Identity()).norm(), 1e-15);
  EXPECT_LT(elastic_stress(Mat2::Zero(), 3, 2).norm(), 1e-15);
  Mat2 shear;
  shear << 0, 0.5, 0.5, 0;
  Mat2 expect;
  expect << 0, 1, 1, 0;
  EXPECT_LT((elastic_stress(shear, 123.0, 1.0) - expect).norm(), 1e-15);
}

TEST(Material, ElasticStressSymmetricBilinear) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 1);
  for (int k = 0; k < 20; ++k) {
    Mat2 a, b;
    a << n(rng), n(rng), 0, n(rng);
    b << n(rng), n(rng), 0, n(rng);
    a(1, 0) = a(0, 1);
    b(1, 0) = b(0, 1);
    const double l = std::abs(n(rng)), m = 0.1 + std::abs(n(rng));
    EXPECT_NEAR((elastic_stress(a, l, m).array() * b.array()).sum(), (elastic_stress(b, l, m).array() * a.array()).sum(),
                1e-12);
    EXPECT_LT((elastic_stress(a + 2 * b, l, m) - elastic_stress(a, l, m) - 2 * elastic_stress(b, l, m)).norm(), 1e-12);
  }
}

TEST(Material, PorePressure) {
  EXPECT_NEAR(pore_pressure(1.0, -1.0, 1.0, 1.0), 0.0, 0);
  EXPECT_NEAR(pore_pressure(1e-4, 0.0, 1e4, 1.0), -1.0, 1e-14);
  EXPECT_EQ(pore_pressure(0.0, 0.0, 5.0, 0.7), 0.0);
}

TEST(Material, StiffnessNorm) {
  EXPECT_NEAR(stiffness_norm(1, 1), mandel_norm(1, 1), 1e-12);
  EXPECT_NEAR(stiffness_norm(1, 1), 4.0, 1e-14);
  EXPECT_NEAR(stiffness_norm(0, 0.7), 1.4, 1e-14);
  EXPECT_NEAR(stiffness_norm(1e6, 1), 2e6 + 2, 1e-6);
  EXPECT_NEAR(stiffness_norm(1e6, 1), mandel_norm(1e6, 1), 1e-6);
}

TEST(Material, PresetsAreAdmissible) {
  for (const char* name : {"test1", "test2", "test3A", "test3B"}) {
    const auto p = material_preset(name);
    EXPECT_NO_THROW(validate(p.poro)) << name;
    EXPECT_NO_THROW(validate(p.fluid)) << name;
    EXPECT_NO_THROW(validate(p.iface)) << name;
    EXPECT_TRUE(density_block_pd(p.poro)) << name;
    EXPECT_GE(p.poro.rho_w(), p.poro.rho_f) << name;
  }
}

TEST(Material, PresetValues) {
  const auto t1 = material_preset("test1");
  EXPECT_EQ(t1.poro.rho_w(), 2.0);
  EXPECT_EQ(t1.poro.eta_k(), 1.0);
  EXPECT_EQ(t1.fluid.mu_f, 0.5);
  EXPECT_EQ(t1.iface.gamma, 0.0);
  const auto t2 = material_preset("test2");
  EXPECT_EQ(t2.poro.lambda, 1.0);
  EXPECT_EQ(t2.poro.mu, 0.5);
  EXPECT_EQ(t2.iface.alpha, 2.0);
  const auto b = material_preset("test3B");
  EXPECT_EQ(b.poro.lambda, 1e6);
  EXPECT_EQ(b.poro.eta_k(), 1e4);
  EXPECT_EQ(b.poro.m, 1e4);
  EXPECT_EQ(b.iface.delta, 100.0);
  EXPECT_EQ(b.iface.gamma, 1.0);
  // Poisson ratio of set B
  EXPECT_NEAR(b.poro.lambda / (2 * (b.poro.lambda + b.poro.mu)), 0.4999995, 1e-12);
  EXPECT_THROW(material_preset("nope"), ConfigError);
}

TEST(Material, BoundsRejected) {
  PoroMaterial p;
  p.phi = 1.0;
  EXPECT_THROW(validate(p), ValidationError);
  p = {};
  p.beta = 0.4;  // beta must exceed phi
  EXPECT_THROW(validate(p), ValidationError);
  p = {};
  p.a = 0.5;
  EXPECT_THROW(validate(p), ValidationError);
  FluidMaterial f;
  f.mu_f = 0.0;
  EXPECT_THROW(validate(f), ValidationError);
  InterfaceParams i;
  i.gamma = -1.0;
  EXPECT_THROW(validate(i), ValidationError);
}

TEST(Material, ModelIndexesByRegion) {
  const PolyMesh mesh = generate_cartesian(verification_boxes(), 2, 2);
  PoroMaterial p;
  p.lambda = 3.0;
  FluidMaterial f;
  f.mu_f = 0.25;
  const MaterialModel mat(mesh, p, f, {});
  for (int c : mesh.region_cells(Region::Poro)) EXPECT_EQ(mat.poro(c).lambda, 3.0);
  for (int c : mesh.region_cells(Region::Fluid)) EXPECT_EQ(mat.fluid(c).mu_f, 0.25);
}
