#include "polydg/stepper.hpp"

#include "polydg/error.hpp"
#include "polydg/parallel.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>

namespace polydg {

void ThetaScheme::validate() const {
  POLYDG_THROW_IF(!(theta >= 0.5 && theta <= 1.0), ConfigError, fmt::format("theta must lie in [1/2, 1], got {}", theta));
  POLYDG_THROW_IF(!(dt > 0.0), ConfigError, fmt::format("dt must be positive, got {}", dt));
  POLYDG_THROW_IF(!(tol > 0.0), ConfigError, "solver tolerance must be positive");
}

int ThetaScheme::num_steps(double T) const {
  validate();
  POLYDG_THROW_IF(!(T > 0.0), ConfigError, "final time must be positive");
  const double n = T / dt;
  const double r = std::round(n);
  POLYDG_THROW_IF(std::abs(n - r) > 1e-9 * std::max(1.0, n) || r < 1, ConfigError,
                  fmt::format("T = {} is not an integer multiple of dt = {}", T, dt));
  return static_cast<int>(r);
}

Eigen::VectorXd project_poro_vector(const DgSpace& space, const VectorFn& f, double t) {
  const int d = space.dim(Region::Poro);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.size(Field::V));
  if (!f) return out;
  const auto& cells = space.mesh().region_cells(Region::Poro);
  for (int K : cells) {
    const auto& tab = space.cell_table(K);
    const int c0 = space.cell_start(Field::V, K);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const Vec2 v = f(tab.rule.points[q], t);
      const double w = tab.rule.weights[q];
      for (int c = 0; c < 2; ++c)
        out.segment(c0 + c * d, d) += (w * v(c)) * tab.phi.row(static_cast<Eigen::Index>(q)).transpose();
    }
  }
  return out;
}

SimState project_initial(const DgSpace& space, const InitialData& data, double t0) {
  SimState s;
  s.t = t0;
  s.X = Eigen::VectorXd::Zero(space.ndof());
  s.X.segment(space.offset(Field::U), space.size(Field::U)) = project_poro_vector(space, data.u0, t0);
  s.X.segment(space.offset(Field::W), space.size(Field::W)) = project_poro_vector(space, data.w0, t0);
  s.X.segment(space.offset(Field::V), space.size(Field::V)) = project_poro_vector(space, data.v0, t0);
  s.X.segment(space.offset(Field::Z), space.size(Field::Z)) = project_poro_vector(space, data.z0, t0);
  return s;
}

Stepper::Stepper(const GlobalSystem& sys, ThetaScheme scheme) : sys_(&sys), scheme_(scheme) {
  scheme_.validate();
  POLYDG_THROW_IF(sys.M.rows() != sys.A.rows() || sys.M.cols() != sys.A.cols(), InvalidArgument, "M and A differ in shape");
  K_ = (sys.M + (scheme_.dt * scheme_.theta) * sys.A).pruned();
  B_ = (sys.M - (scheme_.dt * (1.0 - scheme_.theta)) * sys.A).pruned();
  K_.makeCompressed();
  if (scheme_.solver == SolverKind::Direct) {
    lu_.emplace(K_);
  } else {
    iterative_ = std::make_unique<Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>>>();
    iterative_->preconditioner().setDroptol(1e-6);
    iterative_->setTolerance(scheme_.tol);
    iterative_->setMaxIterations(scheme_.max_iterations);
    iterative_->compute(K_);
    POLYDG_THROW_IF(iterative_->info() != Eigen::Success, SolverError, "incomplete LU preconditioner failed");
  }
}

SimState Stepper::step(const SimState& state, const LoadProvider& load) {
  const double dt = scheme_.dt, th = scheme_.theta;
  POLYDG_THROW_IF(state.X.size() != K_.rows(), InvalidArgument, "state size does not match the system");
  Eigen::VectorXd Fk;
  if (cached_load_ && cached_load_->first == state.t) {
    Fk = std::move(cached_load_->second);
  } else {
    Fk = load(state.t);
  }
  const double t1 = state.t + dt;
  Eigen::VectorXd F1 = load(t1);
  Eigen::VectorXd rhs = B_ * state.X + dt * (th * F1 + (1.0 - th) * Fk);
  POLYDG_THROW_IF(!rhs.allFinite(), SolverError, fmt::format("non-finite values in the right-hand side at step {}", state.k + 1));

  SimState next;
  next.t = t1;
  next.k = state.k + 1;
  if (lu_) {
    next.X = lu_->solve(rhs, scheme_.tol);
    last_residual_ = lu_->last_residual();
    last_iterations_ = 0;
  } else {
    next.X = iterative_->solveWithGuess(rhs, state.X);
    last_iterations_ = static_cast<int>(iterative_->iterations());
    last_residual_ = iterative_->error();
    POLYDG_THROW_IF(iterative_->info() != Eigen::Success, SolverError,
                    fmt::format("iterative solver did not converge at step {} (residual {:.3e} after {} iterations)",
                                next.k, last_residual_, last_iterations_));
  }
  cached_load_.emplace(t1, std::move(F1));
  return next;
}

Trajectory run(const GlobalSystem& sys, const ThetaScheme& scheme, const SimState& initial, const LoadProvider& load,
               const RunOptions& opts) {
  const int n = scheme.num_steps(opts.T);
  Stepper stepper(sys, scheme);
  Trajectory traj;
  SimState cur = initial;
  if (opts.stride > 0) traj.snapshots.push_back(cur);
  if (opts.observer) opts.observer(cur);
  for (int k = 0; k < n; ++k) {
    SimState next = stepper.step(cur, load);
    next.t = initial.t + (k + 1) * scheme.dt;
    POLYDG_THROW_IF(!next.X.allFinite(), SolverError, fmt::format("non-finite values in the state at step {}", next.k));
    if (opts.observer) opts.observer(next);
    if (opts.stride > 0 && next.k % opts.stride == 0) traj.snapshots.push_back(next);
    traj.previous_state = std::move(cur);
    cur = std::move(next);
    spdlog::debug("step {} t = {:.6g} residual {:.2e}", cur.k, cur.t, stepper.last_residual());
  }
  traj.steps = n;
  traj.final_state = std::move(cur);
  return traj;
}

void save_checkpoint(const DgSpace& space, const SimState& state, const std::filesystem::path& path) {
  nlohmann::json h;
  h["ndof"] = space.ndof();
  for (Field f : kAllFields) h["offsets"][std::string(to_string(f))] = space.offset(f);
  h["t"] = state.t;
  h["k"] = state.k;
  std::ofstream out(path, std::ios::binary);
  POLYDG_THROW_IF(!out, Error, fmt::format("cannot write checkpoint '{}'", path.string()));
  out << h.dump() << '\n';
  out.write(reinterpret_cast<const char*>(state.X.data()), static_cast<std::streamsize>(state.X.size() * sizeof(double)));
}

SimState load_checkpoint(const DgSpace& space, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  POLYDG_THROW_IF(!in, Error, fmt::format("cannot open checkpoint '{}'", path.string()));
  std::string line;
  std::getline(in, line);
  const auto h = nlohmann::json::parse(line);
  const int n = h.at("ndof").get<int>();
  POLYDG_THROW_IF(n != space.ndof(), ValidationError,
                  fmt::format("checkpoint has {} unknowns, the space has {}", n, space.ndof()));
  SimState s;
  s.t = h.at("t").get<double>();
  s.k = h.at("k").get<int>();
  s.X.resize(n);
  in.read(reinterpret_cast<char*>(s.X.data()), static_cast<std::streamsize>(n * sizeof(double)));
  POLYDG_THROW_IF(!in, ValidationError, "checkpoint is truncated");
  return s;
}

}  // namespace polydg
