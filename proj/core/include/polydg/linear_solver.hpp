#pragma once

#include "polydg/assembly.hpp"

#include <memory>

namespace polydg {

/// Sparse LU factorization (UMFPACK) of a square matrix, reused for many right-hand sides.
class SparseLU {
public:
  explicit SparseLU(const SpMat& K);
  ~SparseLU();
  SparseLU(const SparseLU&) = delete;
  SparseLU& operator=(const SparseLU&) = delete;
  SparseLU(SparseLU&&) noexcept;
  SparseLU& operator=(SparseLU&&) noexcept;

  /// Solves K x = b; up to three refinement sweeps until the normwise residual is below `tol`.
  Eigen::VectorXd solve(const Eigen::VectorXd& b, double tol = 1e-12) const;
  /// Reciprocal condition estimate reported by the factorization.
  double rcond() const { return rcond_; }
  /// Normwise relative residual of the last solve.
  double last_residual() const { return last_residual_; }
  int rows() const { return static_cast<int>(K_.rows()); }

private:
  Eigen::VectorXd raw_solve(const Eigen::VectorXd& b) const;

  SpMat K_;
  double norm_inf_ = 0.0;
  void* numeric_ = nullptr;
  double rcond_ = 0.0;
  mutable double last_residual_ = 0.0;
};

/// Normwise backward error ||b - K x||_inf / (||K||_inf ||x||_inf + ||b||_inf).
double normwise_residual(const SpMat& K, const Eigen::VectorXd& x, const Eigen::VectorXd& b, double norm_K);
double sparse_norm_inf(const SpMat& K);

}  // namespace polydg
