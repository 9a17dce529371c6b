#pragma once

#include "polydg/assembly.hpp"

#include <array>
#include <functional>

namespace polydg {

using ScalarFn = std::function<double(const Vec2&, double)>;
using VectorFn = std::function<Vec2(const Vec2&, double)>;
using TensorFn = std::function<Mat2(const Vec2&, double)>;

/// Data of the right-hand side. Empty boundary/interface functions mean homogeneous data.
struct LoadSources {
  VectorFn f_p, g_p;
  /// Direct route: F_f = grad H and H = int_0^t h_f + u_f0 in closed form.
  TensorFn F_f;
  VectorFn H;
  /// Integrated route (used when H is empty): composite trapezoid of h_f on the grid h_dt.
  VectorFn h_f, u_f0;
  double h_dt = 0.0;

  VectorFn g_fD;                // fluid velocity on the fluid Dirichlet boundary
  VectorFn u_pD, w_pD;          // poroelastic displacements on the poroelastic Dirichlet boundary
  TensorFn sigma_pN;            // total stress on the poroelastic Neumann boundary (traction = sigma n)
  ScalarFn p_pN;                // pore pressure on the poroelastic Neumann boundary
  TensorFn Sigma_N;             // fluid Neumann data: Sigma_f n = Sigma_N n
  std::array<ScalarFn, 5> f_I;  // interface extras

  /// Throws ConfigError naming the first missing mandatory component.
  void validate() const;
  /// H(x, t) through whichever route is configured.
  Vec2 eval_H(const Vec2& x, double t) const;
  bool has_closed_form_H() const { return static_cast<bool>(H); }
};

enum class FluidLoadForm : std::uint8_t { Boundary, Volume };

/// F(t) in the global layout (rows V, Z and S are populated).
Eigen::VectorXd assemble_load(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec,
                              const LoadSources& src, double t);

/// Only the (F_f, tau) + <G_f, tau n_f> part, in the boundary form or the integrated-by-parts volume form.
Eigen::VectorXd assemble_fluid_load(const DgSpace& space, const LoadSources& src, double t, FluidLoadForm form);

}  // namespace polydg

namespace polydg {

/// Initial displacements and rates of the poroelastic region (empty = zero).
struct InitialData {
  VectorFn u0, w0, v0, z0;
};

}  // namespace polydg
