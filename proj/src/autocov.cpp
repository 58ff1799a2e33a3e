#include "memnet/autocov.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "memnet/fracdiff.hpp"

namespace memnet {

namespace {

using cd = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;

void check_inputs(const FilterMatrices& filters, const VectorXd& d, const VectorXd& sigma2) {
  if (filters.empty()) throw DimensionMismatch("autocovariance: no filter matrices");
  const Eigen::Index n = filters[0].rows();
  if (d.size() != n || sigma2.size() != n)
    throw DimensionMismatch("autocovariance: d and sigma2 must have one entry per node");
  require_memory(d);
  require_variances(sigma2);
}

}  // namespace

Autocov fignar_acv(const FilterMatrices& filters, const VectorXd& d, const VectorXd& sigma2,
                   int H, const LongMemoryAcvOptions& opts) {
  check_inputs(filters, d, sigma2);
  const int n = static_cast<int>(d.size());
  AcvOptions gopts;
  gopts.trunc_tol = opts.trunc_tol;
  const Autocov xi = gnar_acv(filters, sigma2, -1, gopts);
  const int M = xi.max_lag();

  Autocov out(n, H);
  out.m_trunc = M;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      // xi_ik(m) for m in [-M, M]
      std::vector<double> x(2 * M + 1);
      bool any = false;
      for (int m = -M; m <= M; ++m) {
        x[m + M] = xi.entry(m, i, k);
        any = any || x[m + M] != 0.0;
      }
      if (!any) continue;
      const auto kap = fiwn_kernel(d[i], d[k], -M, H + M);  // index u + M
      for (int h = 0; h <= H; ++h) {
        double acc = 0.0;
        for (int m = -M; m <= M; ++m) acc += x[m + M] * kap[h - m + M];
        out[h](i, k) = acc;
      }
    }
  }
  out[0] = (0.5 * (out[0] + out[0].transpose())).eval();
  return out;
}

CompanionForm companion_reduce(const FilterMatrices& filters, const VectorXd& d,
                               const VectorXd& sigma2) {
  CompanionForm cf;
  cf.F = companion_matrix(filters);
  const Eigen::Index n = d.size(), np = cf.F.rows();
  cf.d_padded = VectorXd::Zero(np);
  cf.sigma2_padded = VectorXd::Zero(np);
  cf.d_padded.head(n) = d;
  cf.sigma2_padded.head(n) = sigma2;
  return cf;
}

Autocov gnarfi_acv(const FilterMatrices& filters, const VectorXd& d, const VectorXd& sigma2,
                   int H, const LongMemoryAcvOptions& opts) {
  check_inputs(filters, d, sigma2);
  const int n = static_cast<int>(d.size());
  const CompanionForm cf = companion_reduce(filters, d, sigma2);
  const int np = static_cast<int>(cf.F.rows());

  Eigen::EigenSolver<MatrixXd> es(cf.F);
  if (es.info() != Eigen::Success) throw NearDefective("gnarfi_acv: eigendecomposition failed");
  const Eigen::VectorXcd lam = es.eigenvalues();
  const MatrixXcd V = es.eigenvectors();
  const double rho = lam.cwiseAbs().maxCoeff();
  if (!(rho < 1.0 - 1e-8))
    throw NotStationary("GNAR companion spectral radius " + std::to_string(rho) + " >= 1");

  Eigen::JacobiSVD<MatrixXcd> svd(V);
  const auto sv = svd.singularValues();
  const double cond = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
  if (!(cond <= opts.cond_max))
    throw NearDefective("gnarfi_acv: eigenvector condition number " + std::to_string(cond));
  const MatrixXcd Vinv = V.partialPivLu().inverse();
  const MatrixXcd W = Vinv.leftCols(n);
  const MatrixXcd Vt = V.topRows(n);

  // Geometric tail length so that rho^U / (1 - rho) < tol.
  int U = 0;
  if (rho > 0.0) {
    const double u = std::log(opts.trunc_tol * (1.0 - rho)) / std::log(rho);
    U = static_cast<int>(std::min(std::ceil(u), 2.0e6)) + 1;
  }

  // kappa_aa(m), m = 0..H+U+1, symmetric in m.
  std::vector<std::vector<double>> kap(n);
  for (int a = 0; a < n; ++a) kap[a] = fiwn_cross_acv_seq(d[a], d[a], H + U + 1);
  auto kappa = [&](int a, long m) { return kap[a][static_cast<std::size_t>(m < 0 ? -m : m)]; };

  // Sm[x][a][h] = sum_{u>=0} lam_x^u kappa(h-u);  Sp[y][a][h] = sum_{u>=1} mu_y^u kappa(h+u).
  std::vector<std::vector<std::vector<cd>>> Sm(np, std::vector<std::vector<cd>>(n)),
      Sp(np, std::vector<std::vector<cd>>(n));
  for (int x = 0; x < np; ++x) {
    const cd l = lam[x], mu = std::conj(lam[x]);
    for (int a = 0; a < n; ++a) {
      auto& sm = Sm[x][a];
      auto& sp = Sp[x][a];
      sm.assign(H + 1, 0.0);
      sp.assign(H + 1, 0.0);
      cd acc = 0.0, pw = 1.0;
      for (int u = 0; u <= U; ++u) {
        acc += pw * kappa(a, -u);
        pw *= l;
        if (std::abs(pw) == 0.0) break;
      }
      sm[0] = acc;
      for (int h = 1; h <= H; ++h) sm[h] = kappa(a, h) + l * sm[h - 1];
      acc = 0.0;
      pw = mu;
      for (int u = 1; u <= U; ++u) {
        if (std::abs(pw) == 0.0) break;
        acc += pw * kappa(a, static_cast<long>(H) + u);
        pw *= mu;
      }
      sp[H] = acc;
      for (int h = H - 1; h >= 0; --h) sp[h] = mu * (kappa(a, h + 1) + sp[h + 1]);
    }
  }

  Autocov out(n, H);
  out.m_trunc = U;
  MatrixXcd inner(np, np);
  double max_imag = 0.0, scale = 0.0;
  for (int h = 0; h <= H; ++h) {
    for (int x = 0; x < np; ++x)
      for (int y = 0; y < np; ++y) {
        cd acc = 0.0;
        for (int a = 0; a < n; ++a)
          acc += W(x, a) * std::conj(W(y, a)) * sigma2[a] * (Sm[x][a][h] + Sp[y][a][h]);
        inner(x, y) = acc / (1.0 - lam[x] * std::conj(lam[y]));
      }
    const MatrixXcd G = Vt * inner * Vt.adjoint();
    out[h] = G.real();
    max_imag = std::max(max_imag, G.imag().cwiseAbs().maxCoeff());
    scale = std::max(scale, G.real().cwiseAbs().maxCoeff());
  }
  if (max_imag > opts.imag_tol * std::max(1.0, scale))
    throw NearDefective("gnarfi_acv: imaginary residue " + std::to_string(max_imag));
  out[0] = (0.5 * (out[0] + out[0].transpose())).eval();
  return out;
}

}  // namespace memnet
