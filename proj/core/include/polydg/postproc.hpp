#pragma once

#include "polydg/assembly.hpp"
#include "polydg/sources.hpp"
#include "polydg/stepper.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace polydg {

/// Cellwise polynomial field in the orthonormal basis; coeff[cell] is (modes x components), empty off its region.
struct CellField {
  int components = 1;
  Region region = Region::Poro;
  std::vector<Eigen::MatrixXd> coeff;

  bool defined_on(int cell) const { return coeff[static_cast<std::size_t>(cell)].size() > 0; }
  /// Component values at x (which must lie in `cell`).
  Eigen::VectorXd eval(const DgSpace& space, int cell, const Vec2& x) const;
  /// Cell mean of every component.
  Eigen::VectorXd mean(const DgSpace& space, int cell) const;
};

struct FieldSnapshot {
  double t = 0.0;
  std::map<std::string, CellField> fields;  // u_p, w_p, v_p, z_p, Sigma_f, u_f, p_f, p_p
};

/// Blocks of the state as cell fields.
CellField poro_vector_field(const DgSpace& space, Field f, const Eigen::VectorXd& X);
CellField stress_field(const DgSpace& space, const Eigen::VectorXd& X);

struct FluidRecovery {
  CellField u_f, p_f;
};
/// u_f = rho_f^-1 div Sigma + H (L2-projected per cell), p_f = -tr(Sigma')/2 with Sigma' from `S_rate` (S block coefficients).
FluidRecovery recover_fluid(const DgSpace& space, const MaterialModel& mat, const Eigen::VectorXd& X,
                            const Eigen::VectorXd& S_rate, const LoadSources& src, double t);
/// Backward difference (S^k - S^{k-1}) / dt; throws at k = 0.
Eigen::VectorXd backward_stress_rate(const DgSpace& space, const SimState& cur, const std::optional<SimState>& prev);
/// p_p = -m (beta div u + div w), projected per p-cell.
CellField recover_poro_pressure(const DgSpace& space, const MaterialModel& mat, const Eigen::VectorXd& X);

FieldSnapshot make_snapshot(const DgSpace& space, const MaterialModel& mat, const SimState& s,
                            const std::optional<SimState>& prev, const LoadSources& src);

/// Legacy ASCII VTK unstructured grid; cell means as CELL_DATA and vertex averages as POINT_DATA.
void export_vtk(const FieldSnapshot& snap, const DgSpace& space, const std::filesystem::path& path);

struct ProfileLine {
  std::string name;
  Vec2 a, b;
  int samples = 101;
};
/// Samples every snapshot field along the lines (points outside the field's region are skipped).
void export_csv_profiles(const FieldSnapshot& snap, const DgSpace& space, const std::vector<ProfileLine>& lines,
                         const std::filesystem::path& path);

struct InterfaceFlux {
  std::vector<double> s;  // arc coordinate along the interface
  std::vector<Vec2> x;
  std::vector<double> porous, fluid;  // (alpha u_p' + w_p').n_p and u_f.n_p
  std::vector<double> weights;        // quadrature weights
  double length = 0.0;
  double mismatch_l2 = 0.0;
  /// L2 mismatch restricted to points with s in [s0, s1].
  double mismatch_l2_on(double s0, double s1) const;
};
/// Flux traces on the interface quadrature points, sorted by s; rates from the auxiliary blocks V, Z.
InterfaceFlux interface_flux(const DgSpace& space, const MaterialModel& mat, const Eigen::VectorXd& X,
                             const LoadSources& src, double t);
void export_interface_csv(const InterfaceFlux& flux, const std::filesystem::path& path);

/// Largest |mean_K - mean_L| of p_p over interior poroelastic faces and the global range of the cell means.
struct CheckerboardReport {
  double max_neighbor_jump = 0.0;
  double range = 0.0;
  double max_abs = 0.0;
};
CheckerboardReport pressure_checkerboard(const DgSpace& space, const CellField& p_p);

/// Cell containing x (boundary points resolve to the first match), -1 if none.
int locate_cell(const PolyMesh& mesh, const Vec2& x, double tol = 1e-12);

}  // namespace polydg
