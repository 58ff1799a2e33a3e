#pragma once

#include <functional>
#include <vector>

#include "memnet/toeplitz.hpp"
#include "memnet/types.hpp"

namespace memnet {

/// Called once per order s = 0..max_order with the forward coefficients
/// [Phi_{s,1} ... Phi_{s,s}] (N x N*s) and the prediction-error covariance
/// V(s). The predictor of X_{t} from the s previous values is
/// sum_j Phi_{s,j} X_{t-j}. Return false to stop early.
using DLObserver =
    std::function<bool(int s, const Eigen::Ref<const MatrixXd>& phi, const MatrixXd& V)>;

struct DLState {
  int orders = 0;                ///< number of orders visited (s = 0..orders-1)
  std::vector<double> logdet_v;  ///< log|V(s)|
  std::vector<double> increments;  ///< log|V(s)| - log|V(s-1)|, increments[0] = 0
  MatrixXd phi;                  ///< forward coefficients of the last order
  MatrixXd phi_backward;         ///< backward coefficients [Phi~_{s,s} ... Phi~_{s,1}]
  MatrixXd V, V_backward;
};

/// Whittle's multivariate Durbin-Levinson recursion for orders 0..max_order.
/// Throws NotPositiveDefinite with the failing order.
DLState durbin_levinson(const Autocov& acv, int max_order, const DLObserver& observer = {});

/// log|Sigma_T| = sum_{s=0}^{T-1} log|V(s)|.
double logdet_exact(const Autocov& acv, int T);

struct SplineLogdet {
  double value = 0.0;
  int exact_steps = 0;  ///< orders evaluated exactly before the spline takes over
  bool fell_back = false;
};

/// Exact orders until |log|V(s)| - log|V(s-1)|| < eps_s, V(T-1) from a Schur
/// complement solved by PCG, and a monotone cubic spline in between.
SplineLogdet logdet_spline(const Autocov& acv, int T, double eps_s = 1e-6,
                           double pcg_tol = 1e-10);

/// Natural cubic spline through (x, y) with Fritsch-Carlson limited slopes.
class MonotoneSpline {
 public:
  MonotoneSpline(std::vector<double> x, std::vector<double> y);
  double operator()(double t) const;
  bool monotone() const { return monotone_; }

 private:
  std::vector<double> x_, y_, m_;
  bool monotone_ = true;
};

enum class DetMethod { exact, spline };

struct LoglikOptions {
  DetMethod det = DetMethod::exact;
  double eps_s = 1e-6;
  PcgOptions pcg;
};

/// -(TN/2) log 2pi - 1/2 log|Sigma| - 1/2 x' Sigma^{-1} x with x node-major.
double gaussian_loglik(const Autocov& acv, const SeriesPanel& data,
                       const LoglikOptions& opts = {});

}  // namespace memnet
