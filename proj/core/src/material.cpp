#include "polydg/material.hpp"

#include "polydg/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace polydg {

void validate(const PoroMaterial& p) {
  auto need = [](bool ok, const char* what) {
    POLYDG_THROW_IF(!ok, ValidationError, fmt::format("poroelastic material: {}", what));
  };
  need(p.phi > 0.0 && p.phi < 1.0, "porosity must satisfy 0 < phi < 1");
  need(p.a >= 1.0, "tortuosity must be >= 1");
  need(p.eta > 0.0 && p.k > 0.0, "eta and k must be positive");
  need(p.mu > 0.0, "mu must be positive");
  need(p.lambda >= 0.0, "lambda must be >= 0");
  need(p.m > 0.0, "m must be positive");
  need(p.rho_f > 0.0 && p.rho_s > 0.0, "densities must be positive");
  need(p.beta > p.phi && p.beta <= 1.0, "Biot-Willis coefficient must satisfy phi < beta <= 1");
  need(density_block_pd(p), "density block [[rho, rho_f], [rho_f, rho_w]] is not positive definite");
}

void validate(const FluidMaterial& f) {
  POLYDG_THROW_IF(!(f.rho_f > 0.0 && f.mu_f > 0.0), ValidationError, "fluid material: rho_f and mu_f must be positive");
}

void validate(const InterfaceParams& i) {
  POLYDG_THROW_IF(!(i.alpha > 0.0), ValidationError, "interface: alpha must be positive");
  POLYDG_THROW_IF(!(i.delta > 0.0), ValidationError, "interface: delta must be positive");
  POLYDG_THROW_IF(!(i.gamma >= 0.0), ValidationError, "interface: gamma must be >= 0");
}

MaterialModel::MaterialModel(const PolyMesh& mesh, const PoroMaterial& poro, const FluidMaterial& fluid,
                             const InterfaceParams& iface)
    : mesh_(&mesh),
      poro_(static_cast<std::size_t>(mesh.num_region_cells(Region::Poro)), poro),
      fluid_(static_cast<std::size_t>(mesh.num_region_cells(Region::Fluid)), fluid),
      iface_(iface) {}

const PoroMaterial& MaterialModel::poro(int cell) const {
  const auto& c = mesh_->cell(cell);
  POLYDG_THROW_IF(c.region != Region::Poro, InvalidArgument, fmt::format("cell {} is not poroelastic", cell));
  return poro_[static_cast<std::size_t>(c.local_index)];
}

const FluidMaterial& MaterialModel::fluid(int cell) const {
  const auto& c = mesh_->cell(cell);
  POLYDG_THROW_IF(c.region != Region::Fluid, InvalidArgument, fmt::format("cell {} is not a fluid cell", cell));
  return fluid_[static_cast<std::size_t>(c.local_index)];
}

void MaterialModel::validate() const {
  for (const auto& p : poro_) polydg::validate(p);
  for (const auto& f : fluid_) polydg::validate(f);
  polydg::validate(iface_);
}

Mat2 elastic_stress(const Mat2& eps, double lambda, double mu) {
  return 2.0 * mu * eps + lambda * (eps(0, 0) + eps(1, 1)) * Mat2::Identity();
}

double pore_pressure(double div_u, double div_w, double m, double beta) { return -m * (beta * div_u + div_w); }

double stiffness_norm(double lambda, double mu) { return std::max(2.0 * mu, 2.0 * mu + 2.0 * lambda); }

bool density_block_pd(const PoroMaterial& p) {
  const double r = p.rho();
  const double rw = p.rho_w();
  return r > 0.0 && r * rw - p.rho_f * p.rho_f > 0.0;
}

MaterialPreset material_preset(std::string_view name) {
  MaterialPreset s;
  s.poro = PoroMaterial{};  // rho_s = rho_f = 1, phi = 0.5, a = 1: rho = 1, rho_w = 2
  s.fluid = FluidMaterial{1.0, 0.5};
  if (name == "test1") {
    s.iface = {1.0, 1.0, 0.0};
  } else if (name == "test2") {
    s.poro.lambda = 1.0;
    s.poro.mu = 0.5;
    s.iface = {2.0, 1.0, 0.0};
  } else if (name == "test3A") {
    s.iface = {1.0, 1.0, 1.0};
  } else if (name == "test3B") {
    s.poro.lambda = 1e6;
    s.poro.k = 1e-4;
    s.poro.m = 1e4;
    s.iface = {1.0, 100.0, 1.0};
  } else {
    throw ConfigError(fmt::format("unknown preset '{}' (expected test1, test2, test3A or test3B)", name));
  }
  return s;
}

}  // namespace polydg
