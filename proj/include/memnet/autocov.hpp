#pragma once

#include "memnet/gnar.hpp"
#include "memnet/types.hpp"

namespace memnet {

struct LongMemoryAcvOptions {
  double trunc_tol = 1e-12;
  double cond_max = 1e8;
  double imag_tol = 1e-8;
};

/// FIGNAR: X = (1-L)^{-d} Y with Y the GNAR recursion. Omega(h)_ik is the
/// convolution of xi(.)_ik with the unit-noise FIWN kernel kappa_ik.
Autocov fignar_acv(const FilterMatrices& filters, const VectorXd& d, const VectorXd& sigma2,
                   int H, const LongMemoryAcvOptions& opts = {});

/// GNARFI: X_t = sum_j A_j X_{t-j} + Z_t with Z FIWN(d). Uses the eigen
/// decomposition of the companion matrix.
Autocov gnarfi_acv(const FilterMatrices& filters, const VectorXd& d, const VectorXd& sigma2,
                   int H, const LongMemoryAcvOptions& opts = {});

struct CompanionForm {
  MatrixXd F;           ///< Np x Np VAR(1) matrix
  VectorXd d_padded;    ///< (d, 0, ..., 0)
  VectorXd sigma2_padded;
};

CompanionForm companion_reduce(const FilterMatrices& filters, const VectorXd& d,
                               const VectorXd& sigma2);

}  // namespace memnet
