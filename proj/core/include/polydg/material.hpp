#pragma once

#include "polydg/geometry.hpp"
#include "polydg/mesh.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace polydg {

struct PoroMaterial {
  double rho_s = 1.0;
  double rho_f = 1.0;
  double phi = 0.5;  // porosity
  double a = 1.0;    // tortuosity
  double eta = 1.0;  // dynamic viscosity
  double k = 1.0;    // permeability
  double lambda = 1.0;
  double mu = 1.0;
  double beta = 1.0;  // Biot-Willis
  double m = 1.0;     // Biot modulus

  double rho() const { return phi * rho_f + (1.0 - phi) * rho_s; }
  double rho_w() const { return a / phi * rho_f; }
  double eta_k() const { return eta / k; }
};

struct FluidMaterial {
  double rho_f = 1.0;
  double mu_f = 0.5;
};

struct InterfaceParams {
  double alpha = 1.0;
  double delta = 1.0;
  double gamma = 0.0;
};

/// Element-wise constant coefficients; indexed by the cell's local index inside its region.
class MaterialModel {
public:
  MaterialModel() = default;
  MaterialModel(const PolyMesh& mesh, const PoroMaterial& poro, const FluidMaterial& fluid, const InterfaceParams& iface);

  const PoroMaterial& poro(int cell) const;
  const FluidMaterial& fluid(int cell) const;
  PoroMaterial& poro_mut(int local) { return poro_[static_cast<std::size_t>(local)]; }
  const InterfaceParams& interface() const { return iface_; }
  const std::vector<PoroMaterial>& poro_cells() const { return poro_; }
  const std::vector<FluidMaterial>& fluid_cells() const { return fluid_; }

  /// Throws ValidationError naming the first violated bound.
  void validate() const;

private:
  const PolyMesh* mesh_ = nullptr;
  std::vector<PoroMaterial> poro_;
  std::vector<FluidMaterial> fluid_;
  InterfaceParams iface_;
};

void validate(const PoroMaterial& p);
void validate(const FluidMaterial& f);
void validate(const InterfaceParams& i);

/// sigma_e = 2 mu eps + lambda tr(eps) I.
Mat2 elastic_stress(const Mat2& eps, double lambda, double mu);
/// p_p = -m (beta div u + div w).
double pore_pressure(double div_u, double div_w, double m, double beta);
/// Spectral norm of the isotropic stiffness on symmetric 2x2 tensors.
double stiffness_norm(double lambda, double mu);
/// Cholesky of [[rho, rho_f], [rho_f, rho_w]] succeeds.
bool density_block_pd(const PoroMaterial& p);

struct MaterialPreset {
  PoroMaterial poro;
  FluidMaterial fluid;
  InterfaceParams iface;
};
/// Names: test1, test2, test3A, test3B.
MaterialPreset material_preset(std::string_view name);

}  // namespace polydg
