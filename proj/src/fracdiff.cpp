#include "memnet/fracdiff.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

namespace memnet {

void require_memory(const VectorXd& d, bool allow_zero) {
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double v = d[i];
    if (!std::isfinite(v) || v >= 0.5 || v < 0.0 || (!allow_zero && v == 0.0))
      throw ValidationError("memory parameter d_" + std::to_string(i + 1) +
                            " outside the admissible range");
  }
}

void require_variances(const VectorXd& sigma2) {
  for (Eigen::Index i = 0; i < sigma2.size(); ++i)
    if (!(sigma2[i] > 0.0) || !std::isfinite(sigma2[i]))
      throw NonPositiveVariance("noise variance sigma2_" + std::to_string(i + 1) +
                                " must be positive");
}

std::vector<double> frac_coeffs(double d, int J) {
  if (J < 1) throw ValidationError("frac_coeffs: J must be >= 1");
  std::vector<double> pi(J + 1);
  pi[0] = 1.0;
  for (int j = 1; j <= J; ++j) pi[j] = pi[j - 1] * ((j - 1) - d) / j;
  return pi;
}

MatrixXd frac_coeffs(const VectorXd& d, int J) {
  MatrixXd out(d.size(), J + 1);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const auto row = frac_coeffs(d[i], J);
    for (int j = 0; j <= J; ++j) out(i, j) = row[j];
  }
  return out;
}

std::vector<double> fracint_coeffs(double d, int J) {
  std::vector<double> psi(J + 1);
  psi[0] = 1.0;
  for (int j = 1; j <= J; ++j) psi[j] = psi[j - 1] * ((j - 1) + d) / j;
  return psi;
}

namespace {

// Gamma(1-di-dk) / (Gamma(dk) Gamma(1-dk)) * Gamma(h+dk) / Gamma(h+1-di), h >= 0.
double phi_direct(double di, double dk, long h) {
  using boost::math::tgamma;
  using boost::math::tgamma_delta_ratio;
  if (dk == 0.0) return h == 0 ? 1.0 : 0.0;
  const double lead = tgamma(1.0 - di - dk) / (tgamma(dk) * tgamma(1.0 - dk));
  // Gamma(x) / Gamma(x + delta) with x = h + dk and delta = 1 - di - dk.
  const double delta = 1.0 - di - dk;
  const double x = static_cast<double>(h) + dk;
  return lead * tgamma_delta_ratio(x, delta);
}

}  // namespace

double fiwn_cross_acv(double d_i, double d_k, long h) {
  if (h < 0) return phi_direct(d_k, d_i, -h);
  return phi_direct(d_i, d_k, h);
}

std::vector<double> fiwn_cross_acv_seq(double d_i, double d_k, int H) {
  std::vector<double> out(H + 1, 0.0);
  out[0] = phi_direct(d_i, d_k, 0);
  if (d_k == 0.0) return out;
  for (int h = 1; h <= H; ++h) out[h] = out[h - 1] * ((h - 1) + d_k) / (h - d_i);
  return out;
}

std::vector<double> fiwn_kernel(double d_i, double d_k, int lo, int hi) {
  std::vector<double> out(hi - lo + 1, 0.0);
  // kappa_ik(u) = phi_ki(u) for u >= 0 and phi_ik(-u) for u < 0.
  if (hi >= 0) {
    const auto pos = fiwn_cross_acv_seq(d_k, d_i, hi);
    for (int u = std::max(lo, 0); u <= hi; ++u) out[u - lo] = pos[u];
  }
  if (lo < 0) {
    const auto neg = fiwn_cross_acv_seq(d_i, d_k, -lo);
    for (int u = lo; u <= std::min(hi, -1); ++u) out[u - lo] = neg[-u];
  }
  return out;
}

MatrixXd fiwn_acv_matrix(const VectorXd& d, const VectorXd& sigma2, int h) {
  if (d.size() != sigma2.size()) throw DimensionMismatch("fiwn_acv_matrix: d and sigma2 differ");
  require_variances(sigma2);
  const Eigen::Index n = d.size();
  MatrixXd eta = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) eta(i, i) = sigma2[i] * fiwn_cross_acv(d[i], d[i], h);
  return eta;
}

Autocov fiwn_acv(const VectorXd& d, const VectorXd& sigma2, int H) {
  if (d.size() != sigma2.size()) throw DimensionMismatch("fiwn_acv: d and sigma2 differ");
  require_variances(sigma2);
  const int n = static_cast<int>(d.size());
  Autocov acv(n, H);
  for (int i = 0; i < n; ++i) {
    const auto seq = fiwn_cross_acv_seq(d[i], d[i], H);
    for (int h = 0; h <= H; ++h) acv[h](i, i) = sigma2[i] * seq[h];
  }
  return acv;
}

}  // namespace memnet
