#pragma once

#include "polydg/material.hpp"
#include "polydg/sources.hpp"

#include <array>
#include <string>
#include <vector>

namespace polydg {

/// Closed-form exact fields of a verification case plus the sources built from them.
struct ManufacturedCase {
  std::string name;
  MaterialPreset params;
  std::vector<RegionBox> boxes;
  double T = 0.1;
  double dt = 1e-3;

  VectorFn u, w, u_t, w_t;
  TensorFn grad_u, grad_w;  // (i, j) = d_j of component i
  TensorFn Sigma, Sigma_t;
  VectorFn div_Sigma;
  ScalarFn r;  // rotation multiplier: skew(grad u_f) = [[0, r], [-r, 0]]
  VectorFn u_f;
  ScalarFn p_f;

  LoadSources sources;

  Mat2 sigma_p(const Vec2& x, double t) const;
  double p_p(const Vec2& x, double t) const;
  /// Exact state at t as initial data (u, w and their rates).
  InitialData initial(double t0 = 0.0) const;
};

/// "test1" (polynomial fields) or "test2" (trigonometric, exponentially decaying).
ManufacturedCase manufactured_case(std::string_view name);

/// Rectangles of the verification cases: p = (-1,0)x(0,1), f = (0,1)x(0,1).
std::vector<RegionBox> verification_boxes();

struct OracleReport {
  double biot_momentum = 0.0;   // rho u'' + rho_f w'' - div sigma_p - f_p
  double biot_filtration = 0.0; // rho_f u'' + rho_w w'' + eta/k w' + grad p_p - g_p
  double stokes_momentum = 0.0; // (2 mu_f)^-1 dev Sigma' - grad(rho_f^-1 div Sigma) + r - F_f
  double stokes_symmetry = 0.0; // skew(Sigma')
  double velocity_rewrite = 0.0;  // u_f - rho_f^-1 div Sigma - H
  double fluid_stress = 0.0;      // Sigma' - (2 mu_f eps(u_f) - p_f I)
  std::array<double, 5> interface{};
  double max() const;
};

/// Central finite differences of the closed-form fields at random space-time samples.
OracleReport residual_oracle(const ManufacturedCase& mc, int samples, std::uint64_t seed);

}  // namespace polydg
