#pragma once

#include <vector>

#include "memnet/network.hpp"
#include "memnet/types.hpp"

namespace memnet {

/// Lag order p, neighbour stages s_1..s_p and covariate count C.
struct GnarOrder {
  int p = 1;
  std::vector<int> s{1};
  int C = 1;

  int max_stage() const;
  int sum_s() const;
  void validate() const;
  /// "(p,[s1,...,sp])"
  std::string label() const;
};

/// alpha is N x p; under the global mode all rows are equal.
/// beta[j][r][c] holds beta_{j+1,r+1,c+1}.
struct GnarParams {
  Mode alpha_mode = Mode::global;
  MatrixXd alpha;
  std::vector<std::vector<std::vector<double>>> beta;

  static GnarParams zeros(int n, const GnarOrder& order, Mode alpha_mode = Mode::global);
};

using FilterMatrices = std::vector<MatrixXd>;

/// A_j = diag(alpha_.j) + sum_c sum_{r <= s_j} beta_{j,r,c} W^(r,c).
FilterMatrices build_filter_matrices(const GnarParams& params, const WeightMatrices& weights,
                                     const GnarOrder& order);

/// Sufficient condition: sum_j (|alpha_ij| + sum_c sum_r |beta_jrc|) < 1 for every node.
bool check_stationarity(const GnarParams& params, const GnarOrder& order);
/// Largest node-wise row sum of the condition above.
double stationarity_margin(const GnarParams& params, const GnarOrder& order);

/// VAR(1) companion matrix of X_t = sum_j A_j X_{t-j} + e_t.
MatrixXd companion_matrix(const FilterMatrices& filters);
double spectral_radius(const MatrixXd& m);

struct AcvOptions {
  double trunc_tol = 1e-12;
  int max_lag_cap = 200000;
};

/// Autocovariance xi(h) = Cov(Y_{t+h}, Y_t) of the VAR recursion driven by
/// noise with covariance `noise_cov`, for h = 0..H. H < 0 computes up to the
/// truncation lag. Lags beyond m_trunc are zero.
Autocov gnar_acv(const FilterMatrices& filters, const MatrixXd& noise_cov, int H,
                 const AcvOptions& opts = {});
Autocov gnar_acv(const FilterMatrices& filters, const VectorXd& sigma2, int H,
                 const AcvOptions& opts = {});

/// Solves S = F S F^T + Q for stable F.
MatrixXd solve_lyapunov(const MatrixXd& F, const MatrixXd& Q);

struct LsFit {
  GnarParams params;
  VectorXd sigma2;  ///< per-node residual variances
  double rss = 0.0;
  int nobs = 0;
};

/// Ordinary least squares on the stacked GNAR regression.
LsFit gnar_ls_fit(const SeriesPanel& data, const WeightMatrices& weights, const GnarOrder& order,
                  Mode alpha_mode);
LsFit gnar_ls_fit(const SeriesPanel& data, const Graph& graph, const GnarOrder& order,
                  Mode alpha_mode, WeightScheme scheme = WeightScheme::equal);

/// One-step predictions X_hat_t = sum_j A_j X_{t-j} for t = p..T-1 (rows of data).
MatrixXd gnar_one_step(const FilterMatrices& filters, const MatrixXd& x, int from_row);

}  // namespace memnet
