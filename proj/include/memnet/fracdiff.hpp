#pragma once

#include <vector>

#include "memnet/types.hpp"

namespace memnet {

/// Coefficients pi_0..pi_J of (1 - L)^d. Row i holds node i.
MatrixXd frac_coeffs(const VectorXd& d, int J);
std::vector<double> frac_coeffs(double d, int J);

/// Coefficients psi_0..psi_J of (1 - L)^{-d}.
std::vector<double> fracint_coeffs(double d, int J);

/// phi_ik(h) = Cov(Z_{i,t}, Z_{k,t+h}) for unit-variance common noise:
/// Gamma(1-d_i-d_k) Gamma(h+d_k) / (Gamma(d_k) Gamma(1-d_k) Gamma(h+1-d_i)),
/// and phi_ki(-h) for h < 0. Direct evaluation through gamma ratios.
double fiwn_cross_acv(double d_i, double d_k, long h);

/// phi_ik(0..H) by the ratio recursion.
std::vector<double> fiwn_cross_acv_seq(double d_i, double d_k, int H);

/// Kernel kappa_ik(u) = Cov(Z_{i,t+u}, Z_{k,t}) for u in [lo, hi], returned
/// with index u - lo.
std::vector<double> fiwn_kernel(double d_i, double d_k, int lo, int hi);

/// eta(h) with eta(h)_ik = sigma2_i * kappa_ii(h) on the diagonal.
MatrixXd fiwn_acv_matrix(const VectorXd& d, const VectorXd& sigma2, int h);

/// eta(0..H) as an autocovariance sequence.
Autocov fiwn_acv(const VectorXd& d, const VectorXd& sigma2, int H);

void require_memory(const VectorXd& d, bool allow_zero = true);
void require_variances(const VectorXd& sigma2);

}  // namespace memnet
