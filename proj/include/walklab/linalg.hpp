#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace walklab {

struct EigenEstimate {
  double value = 0;
  double residual = 0;  // ||A y - value y|| for the unit Ritz vector y
  bool converged = false;
  int iterations = 0;
};

using MatVec = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

struct LanczosOptions {
  int krylov_dim = 60;
  int max_restarts = 400;
  // Stop once the eigenvalue error bound is below rel_tol * scale, where
  // scale is supplied by the caller (for a Dirichlet gap: the gap itself).
  double rel_tol = 1e-10;
  std::function<double(double)> scale;
};

/// Largest algebraic eigenvalue of a symmetric operator on R^n by restarted
/// Lanczos with full reorthogonalization. The start vector is the constant
/// vector, which overlaps the Perron vector of a nonnegative irreducible block.
EigenEstimate lanczos_top(const MatVec& apply, std::size_t n, const LanczosOptions& options = {});

/// Dense largest eigenvalue with its residual.
EigenEstimate dense_top(const Eigen::MatrixXd& a);

}  // namespace walklab
