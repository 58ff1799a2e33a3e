#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "memnet/fft.hpp"
#include "memnet/types.hpp"

namespace memnet {

/// NT x NT symmetric block-Toeplitz covariance with block (t,s) = Gamma(t-s),
/// acting on node-major stacked vectors (index i*T + t).
class BlockToeplitz {
 public:
  BlockToeplitz(const Autocov& acv, int T);

  int N() const { return n_; }
  int T() const { return T_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(n_) * T_; }
  const Autocov& acv() const { return acv_; }

  /// Sigma v by FFT convolution of every scalar Toeplitz block.
  VectorXd apply(const VectorXd& v) const;
  MatrixXd dense() const;

 private:
  int n_, T_, L_;
  Autocov acv_;
  RealFft fft_;
  std::vector<std::vector<cplx>> spec_;  // (i,k) kernel spectra, index i*N+k
};

VectorXd bt_apply(const BlockToeplitz& op, const VectorXd& v);

enum class Preconditioner { circulant, block_jacobi, none };

struct PcgOptions {
  double tol = 1e-9;
  int max_iter = 0;  ///< 0 selects 2*N*T + 100
  Preconditioner preconditioner = Preconditioner::circulant;
};

struct PcgResult {
  double quadform = 0.0;  ///< x' Sigma^{-1} x
  VectorXd solution;      ///< Sigma^{-1} x
  int iterations = 0;
  double rel_residual = 0.0;
  Preconditioner used = Preconditioner::none;
};

/// Solves Sigma y = x by preconditioned conjugate gradients. The circulant
/// preconditioner falls back to block-Jacobi when it is not positive definite.
PcgResult pcg_solve(const BlockToeplitz& op, const VectorXd& x, const PcgOptions& opts = {});
PcgResult pcg_quadform(const BlockToeplitz& op, const VectorXd& x, const PcgOptions& opts = {});

}  // namespace memnet
