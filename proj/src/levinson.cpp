#include "memnet/levinson.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace memnet {

namespace {

double llt_logdet(const Eigen::LLT<MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

DLState durbin_levinson(const Autocov& acv, int max_order, const DLObserver& observer) {
  if (max_order < 0) throw DimensionMismatch("durbin_levinson: negative order");
  acv.require_lag(max_order, "durbin_levinson");
  const int n = acv.dim();
  const Eigen::Index cols = static_cast<Eigen::Index>(n) * max_order;

  // Reversed stack [Gamma(max_order); ...; Gamma(1)].
  MatrixXd R(cols, n);
  for (int q = 0; q < max_order; ++q) R.middleRows(static_cast<Eigen::Index>(q) * n, n) = acv[max_order - q];

  MatrixXd Phi = MatrixXd::Zero(n, cols), B = MatrixXd::Zero(n, cols), Bnext(n, cols);
  MatrixXd V = acv[0], Vb = acv[0];
  DLState st;
  for (int s = 0; s <= max_order; ++s) {
    Eigen::LLT<MatrixXd> llt(V);
    if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().minCoeff() > 0.0))
      throw NotPositiveDefinite("durbin_levinson: V(" + std::to_string(s) +
                                    ") is not positive definite",
                                s);
    const double ld = llt_logdet(llt);
    st.increments.push_back(s == 0 ? 0.0 : ld - st.logdet_v.back());
    st.logdet_v.push_back(ld);
    st.orders = s + 1;
    const Eigen::Index ns = static_cast<Eigen::Index>(n) * s;
    const bool go_on = !observer || observer(s, Phi.leftCols(ns), V);
    if (!go_on || s == max_order) {
      st.phi = Phi.leftCols(ns);
      st.phi_backward = B.leftCols(ns);
      st.V = V;
      st.V_backward = Vb;
      break;
    }
    Eigen::LLT<MatrixXd> lltb(Vb);
    if (lltb.info() != Eigen::Success)
      throw NotPositiveDefinite("durbin_levinson: backward covariance lost definiteness", s);

    MatrixXd delta = acv[s + 1];
    if (s > 0) delta.noalias() -= Phi.leftCols(ns) * R.bottomRows(ns);
    const MatrixXd K = lltb.solve(delta.transpose()).transpose();  // delta Vb^{-1}
    const MatrixXd Kb = llt.solve(delta).transpose();              // delta' V^{-1}

    Bnext.leftCols(n) = Kb;
    if (s > 0) {
      Bnext.middleCols(n, ns) = B.leftCols(ns);
      Bnext.middleCols(n, ns).noalias() -= Kb * Phi.leftCols(ns);
      Phi.leftCols(ns).noalias() -= K * B.leftCols(ns);
    }
    Phi.middleCols(ns, n) = K;
    std::swap(B, Bnext);

    V.noalias() -= K * delta.transpose();
    Vb.noalias() -= Kb * delta;
    V = (0.5 * (V + V.transpose())).eval();
    Vb = (0.5 * (Vb + Vb.transpose())).eval();
  }
  return st;
}

double logdet_exact(const Autocov& acv, int T) {
  const DLState st = durbin_levinson(acv, T - 1);
  double total = 0.0;
  for (double v : st.logdet_v) total += v;
  return total;
}

MonotoneSpline::MonotoneSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t k = x_.size();
  if (k < 2 || y_.size() != k) throw DimensionMismatch("MonotoneSpline: need >= 2 knots");
  std::vector<double> h(k - 1), delta(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    h[i] = x_[i + 1] - x_[i];
    if (!(h[i] > 0)) throw ValidationError("MonotoneSpline: knots must increase");
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  bool up = true, down = true;
  for (double dl : delta) {
    up = up && dl >= 0.0;
    down = down && dl <= 0.0;
  }
  monotone_ = up || down;

  // Natural cubic spline second derivatives (Thomas algorithm).
  std::vector<double> M(k, 0.0);
  if (k > 2) {
    const std::size_t m = k - 2;
    std::vector<double> a(m), b(m), c(m), r(m);
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = h[i];
      b[i] = 2.0 * (h[i] + h[i + 1]);
      c[i] = h[i + 1];
      r[i] = 6.0 * (delta[i + 1] - delta[i]);
    }
    for (std::size_t i = 1; i < m; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    M[m] = r[m - 1] / b[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) M[i + 1] = (r[i] - c[i] * M[i + 2]) / b[i];
  }
  m_.resize(k);
  for (std::size_t i = 0; i + 1 < k; ++i) m_[i] = delta[i] - h[i] * (2.0 * M[i] + M[i + 1]) / 6.0;
  m_[k - 1] = delta[k - 2] + h[k - 2] * (M[k - 2] + 2.0 * M[k - 1]) / 6.0;

  // Fritsch-Carlson limiting.
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (delta[i] == 0.0) {
      m_[i] = m_[i + 1] = 0.0;
      continue;
    }
    if (m_[i] * delta[i] < 0.0) m_[i] = 0.0;
    if (m_[i + 1] * delta[i] < 0.0) m_[i + 1] = 0.0;
    const double al = m_[i] / delta[i], be = m_[i + 1] / delta[i];
    const double r2 = al * al + be * be;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      m_[i] = tau * al * delta[i];
      m_[i + 1] = tau * be * delta[i];
    }
  }
}

double MonotoneSpline::operator()(double t) const {
  const std::size_t k = x_.size();
  std::size_t i = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin();
  i = std::clamp<std::size_t>(i, 1, k - 1) - 1;
  const double h = x_[i + 1] - x_[i];
  const double u = (t - x_[i]) / h;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y_[i] + (u3 - 2 * u2 + u) * h * m_[i] +
         (-2 * u3 + 3 * u2) * y_[i + 1] + (u3 - u2) * h * m_[i + 1];
}

SplineLogdet logdet_spline(const Autocov& acv, int T, double eps_s, double pcg_tol) {
  acv.require_lag(T - 1, "logdet_spline");
  const int n = acv.dim();
  SplineLogdet out;
  auto exact = [&]() {
    out.value = logdet_exact(acv, T);
    out.exact_steps = T;
    out.fell_back = true;
    return out;
  };

  std::vector<double> ld;
  int S = -1;
  durbin_levinson(acv, T - 1, [&](int s, const Eigen::Ref<const MatrixXd>&, const MatrixXd& V) {
    Eigen::LLT<MatrixXd> llt(V);
    ld.push_back(llt_logdet(llt));
    if (s >= 1 && std::abs(ld[s] - ld[s - 1]) < eps_s) {
      S = s;
      return false;
    }
    return true;
  });
  out.exact_steps = static_cast<int>(ld.size());
  if (S < 0 || S >= T - 2) {
    for (double v : ld) out.value += v;
    return out;
  }

  // V(T-1) = Gamma(0) - C' Sigma_{T-1}^{-1} C.
  const int Tm = T - 1;
  const BlockToeplitz op(acv, Tm);
  MatrixXd C(op.size(), n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < Tm; ++t)
        C(static_cast<Eigen::Index>(i) * Tm + t, k) = acv.entry(t - Tm, i, k);
  PcgOptions po;
  po.tol = pcg_tol;
  MatrixXd Vlast = acv[0];
  try {
    for (int l = 0; l < n; ++l) {
      const VectorXd y = pcg_solve(op, C.col(l), po).solution;
      Vlast.col(l) -= C.transpose() * y;
    }
  } catch (const NumericalError&) {
    return exact();
  }
  Vlast = (0.5 * (Vlast + Vlast.transpose())).eval();
  Eigen::LLT<MatrixXd> llt(Vlast);
  if (llt.info() != Eigen::Success) return exact();
  const double ld_last = llt_logdet(llt);

  std::vector<double> xs, ys;
  for (int s = 1; s <= S; ++s) {
    xs.push_back(static_cast<double>(s) / Tm);
    ys.push_back(ld[s]);
  }
  xs.push_back(1.0);
  ys.push_back(ld_last);
  MonotoneSpline spline(xs, ys);
  if (!spline.monotone()) return exact();

  double total = 0.0;
  for (int s = 0; s <= S; ++s) total += ld[s];
  for (int s = S + 1; s <= T - 2; ++s) total += spline(static_cast<double>(s) / Tm);
  total += ld_last;
  out.value = total;
  return out;
}

double gaussian_loglik(const Autocov& acv, const SeriesPanel& data, const LoglikOptions& opts) {
  const int T = data.T(), n = data.N();
  if (acv.dim() != n) throw DimensionMismatch("gaussian_loglik: acv and data dimensions differ");
  acv.require_lag(T - 1, "gaussian_loglik");
  const double logdet =
      opts.det == DetMethod::exact ? logdet_exact(acv, T) : logdet_spline(acv, T, opts.eps_s).value;
  const BlockToeplitz op(acv, T);
  const double quad = pcg_quadform(op, data.stacked(), opts.pcg).quadform;
  return -0.5 * T * n * std::log(2.0 * std::numbers::pi) - 0.5 * logdet - 0.5 * quad;
}

}  // namespace memnet
