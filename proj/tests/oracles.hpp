#pragma once

// Independent reference implementations used only by the tests.

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

#include "memnet/types.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using mp = boost::multiprecision::cpp_bin_float_50;

/// (-1)^j Gamma(d+1) / (Gamma(j+1) Gamma(d-j+1)) in 50-digit arithmetic,
/// with Gamma(d-j+1) for negative non-integer arguments by reflection.
inline double binom_coeff(double d, int j) {
  const mp dd(d);
  const mp pi = boost::math::constants::pi<mp>();
  const mp z = dd - j + 1;
  mp gz;
  if (z > 0) {
    gz = boost::math::tgamma(z);
  } else {
    gz = pi / (sin(pi * z) * boost::math::tgamma(1 - z));
  }
  mp v = boost::math::tgamma(dd + 1) / (boost::math::tgamma(mp(j + 1)) * gz);
  if (j % 2) v = -v;
  return static_cast<double>(v);
}

/// Gamma(1-di-dk) Gamma(h+dk) / (Gamma(dk) Gamma(1-dk) Gamma(h+1-di)) at 50 digits.
inline double fiwn_phi(double di, double dk, long h) {
  const mp a(di), b(dk), hh(h);
  using boost::math::tgamma;
  mp v = tgamma(1 - a - b) * tgamma(hh + b) / (tgamma(b) * tgamma(1 - b) * tgamma(hh + 1 - a));
  return static_cast<double>(v);
}

/// Dense NT x NT covariance, node-major, block (t,s) = Gamma(t-s).
inline MatrixXd dense_sigma(const memnet::Autocov& acv, int T) {
  const int n = acv.dim();
  MatrixXd S(n * T, n * T);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < T; ++s) {
      const MatrixXd G = t >= s ? acv[t - s] : MatrixXd(acv[s - t].transpose());
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) S(i * T + t, k * T + s) = G(i, k);
    }
  return S;
}

inline double dense_logdet(const MatrixXd& S) {
  Eigen::LLT<MatrixXd> llt(S);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

inline double dense_loglik(const MatrixXd& S, const VectorXd& x) {
  Eigen::LLT<MatrixXd> llt(S);
  const double q = x.dot(llt.solve(x));
  return -0.5 * x.size() * std::log(2 * std::numbers::pi) - 0.5 * dense_logdet(S) - 0.5 * q;
}

/// All-pairs hop distances by Floyd-Warshall.
inline std::vector<std::vector<int>> hop_distances(int n, const std::vector<std::pair<int, int>>& edges) {
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<std::vector<int>> D(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) D[i][i] = 0;
  for (auto [a, b] : edges) D[a][b] = D[b][a] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) D[i][j] = std::min(D[i][j], D[i][k] + D[k][j]);
  return D;
}

/// Prim's algorithm on a complete graph with Euclidean lengths; total length.
inline double prim_total(const std::vector<std::pair<double, double>>& pts,
                         std::set<std::pair<int, int>>* edges = nullptr) {
  const int n = static_cast<int>(pts.size());
  std::vector<bool> in(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<int> from(n, -1);
  best[0] = 0;
  double total = 0;
  for (int it = 0; it < n; ++it) {
    int u = -1;
    for (int v = 0; v < n; ++v)
      if (!in[v] && (u < 0 || best[v] < best[u])) u = v;
    in[u] = true;
    total += best[u];
    if (from[u] >= 0 && edges) edges->insert(std::minmax(u, from[u]));
    for (int v = 0; v < n; ++v) {
      const double len = std::hypot(pts[u].first - pts[v].first, pts[u].second - pts[v].second);
      if (!in[v] && len < best[v]) {
        best[v] = len;
        from[v] = u;
      }
    }
  }
  return total;
}

/// Lyapunov fixed point S <- A S A' + Q.
inline MatrixXd lyapunov_fixed_point(const MatrixXd& A, const MatrixXd& Q, double tol = 1e-14) {
  MatrixXd S = Q;
  for (int it = 0; it < 100000; ++it) {
    MatrixXd next = A * S * A.transpose() + Q;
    const double diff = (next - S).cwiseAbs().maxCoeff();
    S = next;
    if (diff < tol) break;
  }
  return S;
}

/// Sample cross-covariance Cov(X_{t+h}, X_t) with the mean assumed zero.
inline MatrixXd sample_acv(const MatrixXd& x, int h) {
  const Eigen::Index T = x.rows();
  return x.bottomRows(T - h).transpose() * x.topRows(T - h) / static_cast<double>(T - h);
}

/// Psi_0..Psi_J of the causal expansion X_t = sum_j Psi_j e_{t-j} for X_t = sum_l A_l X_{t-l} + e_t.
inline std::vector<MatrixXd> ma_weights(const std::vector<MatrixXd>& A, int J) {
  const Eigen::Index n = A[0].rows();
  std::vector<MatrixXd> psi{MatrixXd::Identity(n, n)};
  for (int j = 1; j <= J; ++j) {
    MatrixXd m = MatrixXd::Zero(n, n);
    for (int l = 1; l <= static_cast<int>(A.size()) && l <= j; ++l) m += A[l - 1] * psi[j - l];
    psi.push_back(m);
  }
  return psi;
}

/// Lag-h autocovariance of X_t = sum_j Psi_j Z_{t-j} with Z independent FIWN(d_i, sigma2_i).
inline MatrixXd ma_fiwn_acv(const std::vector<MatrixXd>& psi, const VectorXd& d, const VectorXd& s2,
                            int h) {
  const Eigen::Index n = d.size();
  const int J = static_cast<int>(psi.size()) - 1;
  const int span = 2 * J + std::abs(h) + 1;
  std::vector<VectorXd> eta(span + 1, VectorXd(n));
  for (int u = 0; u <= span; ++u)
    for (Eigen::Index i = 0; i < n; ++i)
      eta[u][i] = d[i] == 0.0 ? (u == 0 ? s2[i] : 0.0) : s2[i] * fiwn_phi(d[i], d[i], u);
  MatrixXd G = MatrixXd::Zero(n, n);
  for (int j = 0; j <= J; ++j)
    for (int l = 0; l <= J; ++l) {
      const int u = std::abs(h - j + l);
      G += psi[j] * eta[u].asDiagonal() * psi[l].transpose();
    }
  return G;
}

}  // namespace oracle
