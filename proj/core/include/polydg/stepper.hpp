#pragma once

#include "polydg/assembly.hpp"
#include "polydg/linear_solver.hpp"
#include "polydg/sources.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <filesystem>
#include <optional>

namespace polydg {

struct SimState {
  double t = 0.0;
  int k = 0;
  Eigen::VectorXd X;

  Eigen::VectorXd block(const DgSpace& space, Field f) const { return X.segment(space.offset(f), space.size(f)); }
};

enum class SolverKind : std::uint8_t { Direct, Iterative };

struct ThetaScheme {
  double theta = 0.5;
  double dt = 1e-3;
  SolverKind solver = SolverKind::Direct;
  /// Residual tolerance: normwise for the direct solver, relative for the iterative one.
  double tol = 1e-12;
  int max_iterations = 10000;

  void validate() const;
  /// Number of steps covering [0, T]; throws unless T / dt is an integer (to 1e-9).
  int num_steps(double T) const;
};

using LoadProvider = std::function<Eigen::VectorXd(double t)>;

/// L2 projection of vector data onto the poroelastic space (block of size V).
Eigen::VectorXd project_poro_vector(const DgSpace& space, const VectorFn& f, double t);
/// L2 projections of the initial data; S and R start at zero.
SimState project_initial(const DgSpace& space, const InitialData& data, double t0 = 0.0);

/// theta-method for M X' + A X = F with one factorization of M + dt theta A.
class Stepper {
public:
  Stepper(const GlobalSystem& sys, ThetaScheme scheme);

  SimState step(const SimState& state, const LoadProvider& load);
  const ThetaScheme& scheme() const { return scheme_; }
  double last_residual() const { return last_residual_; }
  int last_iterations() const { return last_iterations_; }
  double rcond() const { return lu_ ? lu_->rcond() : 0.0; }

private:
  const GlobalSystem* sys_;
  ThetaScheme scheme_;
  SpMat K_, B_;
  std::optional<SparseLU> lu_;
  std::unique_ptr<Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>>> iterative_;
  std::optional<std::pair<double, Eigen::VectorXd>> cached_load_;
  double last_residual_ = 0.0;
  int last_iterations_ = 0;
};

struct RunOptions {
  double T = 0.1;
  /// Keep every `stride`-th state (0 keeps none besides the final one).
  int stride = 0;
  std::function<void(const SimState&)> observer;
};

struct Trajectory {
  std::vector<SimState> snapshots;
  SimState final_state;
  /// The previous state, for backward-difference rates.
  SimState previous_state;
  int steps = 0;
};

/// N_T steps from `initial`; throws SolverError naming the step on non-finite values.
Trajectory run(const GlobalSystem& sys, const ThetaScheme& scheme, const SimState& initial, const LoadProvider& load,
               const RunOptions& opts);

/// One JSON header line (ndof, offsets, t, k) followed by the raw doubles of X.
void save_checkpoint(const DgSpace& space, const SimState& state, const std::filesystem::path& path);
SimState load_checkpoint(const DgSpace& space, const std::filesystem::path& path);

}  // namespace polydg
