#include "polydg/linear_solver.hpp"

#include "polydg/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <umfpack.h>

#include <cmath>

namespace polydg {

double sparse_norm_inf(const SpMat& K) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(K.rows());
  for (int c = 0; c < K.outerSize(); ++c)
    for (SpMat::InnerIterator it(K, c); it; ++it) rows(it.row()) += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

double normwise_residual(const SpMat& K, const Eigen::VectorXd& x, const Eigen::VectorXd& b, double norm_K) {
  const double r = (b - K * x).lpNorm<Eigen::Infinity>();
  const double den = norm_K * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
  return den > 0.0 ? r / den : r;
}

SparseLU::SparseLU(const SpMat& K) : K_(K) {
  POLYDG_THROW_IF(K.rows() != K.cols(), InvalidArgument, "SparseLU: matrix must be square");
  K_.makeCompressed();
  norm_inf_ = sparse_norm_inf(K_);
  const int n = static_cast<int>(K_.rows());
  double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
  umfpack_di_defaults(control);
  void* symbolic = nullptr;
  int status = umfpack_di_symbolic(n, n, K_.outerIndexPtr(), K_.innerIndexPtr(), K_.valuePtr(), &symbolic, control, info);
  if (status != UMFPACK_OK) {
    umfpack_di_free_symbolic(&symbolic);
    throw SolverError(fmt::format("symbolic factorization failed (UMFPACK status {})", status));
  }
  status = umfpack_di_numeric(K_.outerIndexPtr(), K_.innerIndexPtr(), K_.valuePtr(), symbolic, &numeric_, control, info);
  umfpack_di_free_symbolic(&symbolic);
  rcond_ = info[UMFPACK_RCOND];
  if (status == UMFPACK_WARNING_singular_matrix || status != UMFPACK_OK || !(rcond_ > 0.0)) {
    umfpack_di_free_numeric(&numeric_);
    throw SolverError(fmt::format(
        "system matrix is singular (UMFPACK status {}, rcond estimate {:.3e}, n = {}); check penalty constants "
        "and that every region has a Dirichlet boundary",
        status, rcond_, n));
  }
  if (rcond_ < 1e-14) spdlog::warn("system matrix is badly conditioned (rcond estimate {:.3e})", rcond_);
}

SparseLU::~SparseLU() {
  if (numeric_) umfpack_di_free_numeric(&numeric_);
}

SparseLU::SparseLU(SparseLU&& o) noexcept
    : K_(std::move(o.K_)), norm_inf_(o.norm_inf_), numeric_(o.numeric_), rcond_(o.rcond_), last_residual_(o.last_residual_) {
  o.numeric_ = nullptr;
}

SparseLU& SparseLU::operator=(SparseLU&& o) noexcept {
  if (this != &o) {
    if (numeric_) umfpack_di_free_numeric(&numeric_);
    K_ = std::move(o.K_);
    norm_inf_ = o.norm_inf_;
    numeric_ = o.numeric_;
    rcond_ = o.rcond_;
    last_residual_ = o.last_residual_;
    o.numeric_ = nullptr;
  }
  return *this;
}

Eigen::VectorXd SparseLU::raw_solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x(b.size());
  double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
  umfpack_di_defaults(control);
  control[UMFPACK_IRSTEP] = 0;
  const int status = umfpack_di_solve(UMFPACK_A, K_.outerIndexPtr(), K_.innerIndexPtr(), K_.valuePtr(), x.data(), b.data(),
                                      numeric_, control, info);
  POLYDG_THROW_IF(status != UMFPACK_OK, SolverError, fmt::format("UMFPACK solve failed (status {})", status));
  return x;
}

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd& b, double tol) const {
  POLYDG_THROW_IF(b.size() != K_.rows(), InvalidArgument, "SparseLU: right-hand side size mismatch");
  Eigen::VectorXd x = raw_solve(b);
  last_residual_ = normwise_residual(K_, x, b, norm_inf_);
  for (int it = 0; it < 3 && last_residual_ > tol; ++it) {
    x += raw_solve(b - K_ * x);
    last_residual_ = normwise_residual(K_, x, b, norm_inf_);
  }
  POLYDG_THROW_IF(!std::isfinite(last_residual_) || last_residual_ > tol, SolverError,
                  fmt::format("direct solve residual {:.3e} exceeds {:.1e} (rcond estimate {:.3e})", last_residual_, tol, rcond_));
  return x;
}

}  // namespace polydg
