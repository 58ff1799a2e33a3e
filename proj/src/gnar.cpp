#include "memnet/gnar.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace memnet {

int GnarOrder::max_stage() const {
  return s.empty() ? 0 : *std::max_element(s.begin(), s.end());
}

int GnarOrder::sum_s() const {
  int total = 0;
  for (int v : s) total += v;
  return total;
}

void GnarOrder::validate() const {
  if (p < 1) throw ValidationError("order: p must be >= 1");
  if (static_cast<int>(s.size()) != p)
    throw ValidationError("order: s must have exactly p entries");
  for (int v : s)
    if (v < 0) throw ValidationError("order: stages must be nonnegative");
  if (C < 1) throw ValidationError("order: C must be >= 1");
}

std::string GnarOrder::label() const {
  std::ostringstream os;
  os << "(" << p << ",[";
  for (std::size_t j = 0; j < s.size(); ++j) os << (j ? "," : "") << s[j];
  os << "])";
  return os.str();
}

GnarParams GnarParams::zeros(int n, const GnarOrder& order, Mode alpha_mode) {
  GnarParams g;
  g.alpha_mode = alpha_mode;
  g.alpha = MatrixXd::Zero(n, order.p);
  g.beta.resize(order.p);
  for (int j = 0; j < order.p; ++j)
    g.beta[j].assign(order.s[j], std::vector<double>(order.C, 0.0));
  return g;
}

namespace {

void check_shapes(const GnarParams& params, const GnarOrder& order) {
  order.validate();
  if (params.alpha.cols() != order.p)
    throw DimensionMismatch("alpha must have p columns");
  if (static_cast<int>(params.beta.size()) != order.p)
    throw DimensionMismatch("beta must have p lag groups");
  for (int j = 0; j < order.p; ++j) {
    if (static_cast<int>(params.beta[j].size()) != order.s[j])
      throw DimensionMismatch("beta lag " + std::to_string(j + 1) + " must have s_j stages");
    for (const auto& rc : params.beta[j])
      if (static_cast<int>(rc.size()) != order.C)
        throw DimensionMismatch("beta entries must have C covariates");
  }
}

}  // namespace

FilterMatrices build_filter_matrices(const GnarParams& params, const WeightMatrices& weights,
                                     const GnarOrder& order) {
  check_shapes(params, order);
  const int n = static_cast<int>(params.alpha.rows());
  if (order.max_stage() > 0) {
    if (weights.dim() != n) throw DimensionMismatch("weights dimension differs from alpha rows");
    if (weights.max_stage() < order.max_stage())
      throw DimensionMismatch("weights do not cover the required neighbour stages");
    if (weights.covariates() < order.C)
      throw DimensionMismatch("weights do not cover the declared covariates");
  }
  FilterMatrices out;
  for (int j = 0; j < order.p; ++j) {
    MatrixXd a = params.alpha.col(j).asDiagonal();
    for (int r = 1; r <= order.s[j]; ++r)
      for (int c = 1; c <= order.C; ++c) a += params.beta[j][r - 1][c - 1] * weights(r, c);
    out.push_back(std::move(a));
  }
  return out;
}

double stationarity_margin(const GnarParams& params, const GnarOrder& order) {
  check_shapes(params, order);
  double net = 0.0;
  for (int j = 0; j < order.p; ++j)
    for (const auto& rc : params.beta[j])
      for (double b : rc) net += std::abs(b);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < params.alpha.rows(); ++i)
    worst = std::max(worst, params.alpha.row(i).cwiseAbs().sum() + net);
  return worst;
}

bool check_stationarity(const GnarParams& params, const GnarOrder& order) {
  return stationarity_margin(params, order) < 1.0;
}

MatrixXd companion_matrix(const FilterMatrices& filters) {
  const int p = static_cast<int>(filters.size());
  if (p == 0) throw DimensionMismatch("companion_matrix: no filter matrices");
  const Eigen::Index n = filters[0].rows();
  MatrixXd F = MatrixXd::Zero(n * p, n * p);
  for (int j = 0; j < p; ++j) F.block(0, j * n, n, n) = filters[j];
  if (p > 1) F.bottomLeftCorner(n * (p - 1), n * (p - 1)).setIdentity();
  return F;
}

double spectral_radius(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

MatrixXd solve_lyapunov(const MatrixXd& F, const MatrixXd& Q) {
  const Eigen::Index m = F.rows();
  if (m <= 8) {
    // vec(S) = (I - F (x) F)^{-1} vec(Q)
    MatrixXd K = MatrixXd::Identity(m * m, m * m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) K.block(a * m, b * m, m, m) -= F(a, b) * F;
    const VectorXd q = Eigen::Map<const VectorXd>(Q.data(), m * m);
    const VectorXd s = K.partialPivLu().solve(q);
    MatrixXd S = Eigen::Map<const MatrixXd>(s.data(), m, m);
    return 0.5 * (S + S.transpose());
  }
  // Doubling: S = sum_k F^k Q F^k'.
  MatrixXd S = Q, A = F;
  for (int it = 0; it < 64; ++it) {
    const MatrixXd inc = A * S * A.transpose();
    S += inc;
    A = A * A;
    if (inc.cwiseAbs().maxCoeff() <= 1e-17 * S.cwiseAbs().maxCoeff()) break;
  }
  return 0.5 * (S + S.transpose());
}

Autocov gnar_acv(const FilterMatrices& filters, const MatrixXd& noise_cov, int H,
                 const AcvOptions& opts) {
  const int p = static_cast<int>(filters.size());
  if (p == 0) throw DimensionMismatch("gnar_acv: no filter matrices");
  const Eigen::Index n = filters[0].rows();
  if (noise_cov.rows() != n || noise_cov.cols() != n)
    throw DimensionMismatch("gnar_acv: noise covariance has the wrong size");
  const MatrixXd F = companion_matrix(filters);
  const double rho = spectral_radius(F);
  if (!(rho < 1.0 - 1e-8))
    throw NotStationary("GNAR companion spectral radius " + std::to_string(rho) + " >= 1");

  MatrixXd Q = MatrixXd::Zero(n * p, n * p);
  Q.topLeftCorner(n, n) = noise_cov;
  const MatrixXd S = solve_lyapunov(F, Q);

  std::vector<MatrixXd> xi;
  for (int h = 0; h < p; ++h) xi.push_back(S.block(0, h * n, n, n));
  const double scale = xi[0].cwiseAbs().maxCoeff();
  const double thresh = opts.trunc_tol * scale;
  const int cap = H >= 0 ? H : opts.max_lag_cap;

  // Extend by the recursion until p consecutive lags are negligible.
  int quiet = 0;
  int m_trunc = -1;
  for (int h = 1; h < static_cast<int>(xi.size()); ++h) {
    if (xi[h].cwiseAbs().maxCoeff() < thresh) {
      ++quiet;
    } else {
      quiet = 0;
    }
  }
  int h = static_cast<int>(xi.size());
  while (true) {
    if (quiet >= p) {
      m_trunc = h - 1 - p;
      break;
    }
    if (h > opts.max_lag_cap) {
      m_trunc = h - 1;
      break;
    }
    MatrixXd next = MatrixXd::Zero(n, n);
    for (int j = 1; j <= p; ++j) next.noalias() += filters[j - 1] * xi[h - j];
    quiet = next.cwiseAbs().maxCoeff() < thresh ? quiet + 1 : 0;
    xi.push_back(std::move(next));
    ++h;
  }
  m_trunc = std::max(m_trunc, 0);

  const int out_lag = H >= 0 ? cap : m_trunc;
  Autocov acv(static_cast<int>(n), out_lag);
  for (int k = 0; k <= std::min(out_lag, m_trunc); ++k) acv[k] = xi[k];
  acv[0] = 0.5 * (acv[0] + acv[0].transpose()).eval();
  acv.m_trunc = m_trunc;
  return acv;
}

Autocov gnar_acv(const FilterMatrices& filters, const VectorXd& sigma2, int H,
                 const AcvOptions& opts) {
  return gnar_acv(filters, MatrixXd(sigma2.asDiagonal()), H, opts);
}

LsFit gnar_ls_fit(const SeriesPanel& data, const WeightMatrices& weights, const GnarOrder& order,
                  Mode alpha_mode) {
  order.validate();
  const int T = data.T(), n = data.N(), p = order.p;
  const int n_alpha = alpha_mode == Mode::global ? p : n * p;
  const int n_beta = order.C * order.sum_s();
  const int cols = n_alpha + n_beta;
  const int rows_per_node = T - p;
  if (rows_per_node * n <= cols || rows_per_node < 1)
    throw InsufficientData("gnar_ls_fit: too few observations for " + std::to_string(cols) +
                           " regressors");
  if (order.max_stage() > 0 && (weights.dim() != n || weights.max_stage() < order.max_stage()))
    throw DimensionMismatch("gnar_ls_fit: weights do not match data and order");

  const MatrixXd& x = data.values;
  // Neighbour aggregates Z[j][r][c] = (W^(r,c) X_{t-j})_i for all t.
  std::vector<std::vector<MatrixXd>> agg(order.max_stage() + 1);
  for (int r = 1; r <= order.max_stage(); ++r)
    for (int c = 1; c <= order.C; ++c) agg[r].push_back(x * weights(r, c).transpose());

  MatrixXd Xd = MatrixXd::Zero(static_cast<Eigen::Index>(rows_per_node) * n, cols);
  VectorXd y(static_cast<Eigen::Index>(rows_per_node) * n);
  for (int i = 0; i < n; ++i) {
    for (int t = p; t < T; ++t) {
      const Eigen::Index row = static_cast<Eigen::Index>(i) * rows_per_node + (t - p);
      y[row] = x(t, i);
      for (int j = 1; j <= p; ++j) {
        const int col = alpha_mode == Mode::global ? j - 1 : i * p + (j - 1);
        Xd(row, col) = x(t - j, i);
      }
      int col = n_alpha;
      for (int j = 1; j <= p; ++j)
        for (int r = 1; r <= order.s[j - 1]; ++r)
          for (int c = 1; c <= order.C; ++c) Xd(row, col++) = agg[r][c - 1](t - j, i);
    }
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(Xd);
  if (qr.rank() < cols) throw SingularDesign("gnar_ls_fit: design matrix is rank deficient");
  const VectorXd coef = qr.solve(y);
  const VectorXd resid = y - Xd * coef;

  LsFit fit;
  fit.params = GnarParams::zeros(n, order, alpha_mode);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j)
      fit.params.alpha(i, j) = alpha_mode == Mode::global ? coef[j] : coef[i * p + j];
  int col = n_alpha;
  for (int j = 0; j < p; ++j)
    for (int r = 0; r < order.s[j]; ++r)
      for (int c = 0; c < order.C; ++c) fit.params.beta[j][r][c] = coef[col++];
  fit.sigma2.resize(n);
  for (int i = 0; i < n; ++i)
    fit.sigma2[i] =
        resid.segment(static_cast<Eigen::Index>(i) * rows_per_node, rows_per_node).squaredNorm() /
        rows_per_node;
  fit.rss = resid.squaredNorm();
  fit.nobs = rows_per_node * n;
  return fit;
}

LsFit gnar_ls_fit(const SeriesPanel& data, const Graph& graph, const GnarOrder& order,
                  Mode alpha_mode, WeightScheme scheme) {
  if (graph.num_nodes() != data.N())
    throw DimensionMismatch("gnar_ls_fit: graph and data have different node counts");
  const int stages = std::max(order.max_stage(), 1);
  const auto ns = build_neighbour_stages(graph, stages);
  return gnar_ls_fit(data, compute_weights(ns, scheme, graph), order, alpha_mode);
}

MatrixXd gnar_one_step(const FilterMatrices& filters, const MatrixXd& x, int from_row) {
  const int p = static_cast<int>(filters.size());
  const int start = std::max(from_row, p);
  MatrixXd pred = MatrixXd::Zero(x.rows() - start, x.cols());
  for (Eigen::Index t = start; t < x.rows(); ++t)
    for (int j = 1; j <= p; ++j)
      pred.row(t - start) += (filters[j - 1] * x.row(t - j).transpose()).transpose();
  return pred;
}

}  // namespace memnet
