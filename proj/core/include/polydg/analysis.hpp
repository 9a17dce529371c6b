#pragma once

#include "polydg/assembly.hpp"
#include "polydg/manufactured.hpp"
#include "polydg/stepper.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace polydg {

/// Values and gradients of a vector field at the points of a table; grad(i, j) = d_j of component i.
struct VecSample {
  std::vector<Vec2> val;
  std::vector<Mat2> grad;
};
/// Values and row-wise divergences of a tensor field.
struct TenSample {
  std::vector<Mat2> val;
  std::vector<Vec2> div;
};
using VecField = std::function<void(int cell, const BasisTable& tab, VecSample& out)>;
using TenField = std::function<void(int cell, const BasisTable& tab, TenSample& out)>;
using ScalField = std::function<void(int cell, const BasisTable& tab, std::vector<double>& out)>;

/// Discrete fields read from a coefficient vector (captured by value).
VecField discrete_vector(const DgSpace& space, Field f, const Eigen::VectorXd& X);
TenField discrete_tensor(const DgSpace& space, const Eigen::VectorXd& X);
ScalField discrete_rotation(const DgSpace& space, const Eigen::VectorXd& X);
VecField exact_vector(VectorFn f, TensorFn grad, double t);
TenField exact_tensor(TensorFn f, VectorFn div, double t);
ScalField exact_scalar(ScalarFn f, double t);
VecField operator-(VecField a, VecField b);
VecField combine(double a, VecField x, double b, VecField y);
TenField operator-(TenField a, TenField b);
ScalField operator-(ScalField a, ScalField b);

/// Squared contributions of the poroelastic energy norm.
struct PoroEnergy {
  double rate_u = 0, rate_w = 0, damping = 0, robin = 0;
  double dg_e_volume = 0, dg_e_jump = 0, dg_p_volume = 0, dg_p_jump = 0;
  double dg_e() const { return dg_e_volume + dg_e_jump; }
  double dg_p() const { return dg_p_volume + dg_p_jump; }
  double total() const { return rate_u + rate_w + damping + robin + dg_e() + dg_p(); }
};
/// Squared contributions of the fluid energy norm.
struct FluidEnergy {
  double deviatoric = 0, dg_f_volume = 0, dg_f_jump = 0, slip = 0;
  double dg_f() const { return dg_f_volume + dg_f_jump; }
  double total() const { return deviatoric + dg_f() + slip; }
};

/// u, w and their rates v, z (E_p) on the poroelastic cells.
PoroEnergy poro_energy(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec, const VecField& u,
                       const VecField& w, const VecField& v, const VecField& z);
FluidEnergy fluid_energy(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec, const TenField& S);
double l2_norm_sq(const DgSpace& space, Region region, const ScalField& f);

enum class NormKind : std::uint8_t { Ep, Ef, E, dGe, dGp, dGf };
/// Norm (not squared) of a discrete state; rates are the auxiliary blocks V and Z.
double energy_norm(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec, const Eigen::VectorXd& X,
                   NormKind which);

struct ErrorReport {
  double err_Ep = 0, err_Ef = 0, err_r = 0;
  PoroEnergy poro;
  FluidEnergy fluid;
  double err_E() const { return std::sqrt(err_Ep * err_Ep + err_Ef * err_Ef); }
};
/// Errors of a discrete state against the exact fields at time t.
ErrorReport error_vs_exact(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec,
                           const Eigen::VectorXd& X, const ManufacturedCase& mc, double t);

double eoc(double e_coarse, double e_fine, double h_coarse, double h_fine);

struct ConvergenceRow {
  double h = 0;
  int p = 0;
  int ndof = 0;
  int cells = 0;
  double err_Ep = 0, err_Ef = 0, err_r = 0, err_r_mid = 0;
  double eoc_Ep = std::numeric_limits<double>::quiet_NaN();
  double eoc_Ef = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Fills the EOC columns between consecutive rows (h-studies only).
  void compute_eoc();
  std::string to_csv() const;
};

struct ManufacturedRun {
  SimState state;
  ErrorReport errors;
  int ndof = 0;
  double h = 0;
  double weak_symmetry = 0;  // max_k ||Bf^T S^k||_inf / ||S^k||_inf
  /// L2 error of (R^{N-1} + R^N)/2 against r(T - dt/2).
  double err_r_mid = 0;
};

/// Assembles, projects the exact initial state, steps to T and measures the errors.
ManufacturedRun solve_manufactured(const ManufacturedCase& mc, std::shared_ptr<const PolyMesh> mesh, int p_p, int p_f,
                                   const ThetaScheme& scheme, const PenaltySpec& spec, double T);

/// h-study over the given meshes at fixed degree (independent runs, optionally in parallel).
ConvergenceTable run_convergence(const ManufacturedCase& mc, const std::vector<std::shared_ptr<const PolyMesh>>& meshes,
                                 int p, const ThetaScheme& scheme, const PenaltySpec& spec, double T);
/// p-study on a fixed mesh with p_p = p_f = p.
ConvergenceTable run_pstudy(const ManufacturedCase& mc, std::shared_ptr<const PolyMesh> mesh, const std::vector<int>& degrees,
                            const ThetaScheme& scheme, const PenaltySpec& spec, double T);

struct EnergyRecord {
  double t = 0, E = 0, E_p = 0, E_f = 0, E_stored = 0;
};
/// 1/2 (V'M^pV + U'A^pU + S'A^fS) with the assembled blocks.
double stored_energy(const DgSpace& space, const GlobalSystem& sys, const Eigen::VectorXd& X);
EnergyRecord energy_record(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec,
                           const GlobalSystem& sys, const SimState& s);
std::vector<EnergyRecord> energy_monitor(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec,
                                         const GlobalSystem& sys, const std::vector<SimState>& trajectory);
std::string energy_csv(const std::vector<EnergyRecord>& records);

/// ||Bf^T S||_inf / ||S||_inf of a state (0 for a zero stress block).
double weak_symmetry_defect(const DgSpace& space, const GlobalSystem& sys, const Eigen::VectorXd& X);

struct InfSupResult {
  double beta = 0;
  int n_stress = 0, n_rotation = 0;
};
/// Smallest generalized singular value of Bf between the fluid stress Gram norm and the L2 norm of r.
InfSupResult infsup_estimate(const DgSpace& space, const MaterialModel& mat, const PenaltySpec& spec,
                             int max_dofs = 5000);

struct MatrixReport {
  std::map<std::string, double> symmetry;  // relative ||B - B^T||_max / ||B||_max
  bool density_pd = false;                 // Cholesky of the poroelastic density block
  bool elastic_pd = false;                 // Cholesky of A^e (Dirichlet faces penalized)
  bool fluid_mass_psd = false;
  double coupling_transpose = 0;           // ||C^fp - C^pf^T||_max
  double max_symmetry() const;
};
MatrixReport matrix_diagnostics(const DgSpace& space, const GlobalSystem& sys);
double symmetry_residual(const SpMat& m);

}  // namespace polydg
