#include "memnet/simulate.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cctype>

#include "memnet/autocov.hpp"
#include "memnet/fft.hpp"
#include "memnet/fracdiff.hpp"
#include "memnet/levinson.hpp"

namespace memnet {

namespace {

MatrixXd white_noise(int rows, const VectorXd& sigma2, Rng& rng) {
  const int n = static_cast<int>(sigma2.size());
  MatrixXd e(rows, n);
  for (int t = 0; t < rows; ++t)
    for (int i = 0; i < n; ++i) e(t, i) = std::sqrt(sigma2[i]) * rng.normal();
  return e;
}

// In place: x_t += sum_j A_j x_{t-j}.
void run_recursion(const FilterMatrices& A, MatrixXd& x) {
  const int p = static_cast<int>(A.size());
  for (Eigen::Index t = 0; t < x.rows(); ++t)
    for (int j = 1; j <= p && t - j >= 0; ++j)
      x.row(t).noalias() += x.row(t - j) * A[j - 1].transpose();
}

void check_model(const FilterMatrices& A, const VectorXd& d, const VectorXd& sigma2, int T) {
  if (T < 1) throw ValidationError("simulate: T must be positive");
  if (A.empty() || A[0].rows() != d.size() || sigma2.size() != d.size())
    throw DimensionMismatch("simulate: filter, d and sigma2 sizes differ");
  require_memory(d);
  require_variances(sigma2);
  if (!(spectral_radius(companion_matrix(A)) < 1.0))
    throw NotStationary("simulate: the GNAR recursion is not stationary");
}

void check_cfg(const SimConfig& cfg) {
  if (cfg.burn_in < 0) throw ValidationError("simulate: burn_in must be nonnegative");
  if (cfg.filter_order < 0) throw ValidationError("simulate: filter_order must be nonnegative");
}

SeriesPanel finish(const MatrixXd& x, int T) { return SeriesPanel(MatrixXd(x.bottomRows(T))); }

}  // namespace

std::string to_string(SimMethod m) { return m == SimMethod::exact ? "exact" : "truncated"; }

SimMethod parse_sim_method(const std::string& s) {
  if (s == "exact") return SimMethod::exact;
  if (s == "truncated" || s == "truncated_filter") return SimMethod::truncated;
  throw ValidationError("unknown simulation method '" + s + "' (exact|truncated)");
}

SeriesPanel simulate_gaussian(const Autocov& acv, int T, Rng& rng) {
  const int n = acv.dim();
  acv.require_lag(T - 1, "simulate_gaussian");
  MatrixXd x(T, n);
  // Stack of past values, most recent first.
  VectorXd past(static_cast<Eigen::Index>(n) * T);
  durbin_levinson(acv, T - 1, [&](int s, const Eigen::Ref<const MatrixXd>& phi, const MatrixXd& V) {
    VectorXd e(n);
    for (int i = 0; i < n; ++i) e[i] = rng.normal();
    const Eigen::LLT<MatrixXd> llt(V);
    VectorXd xs = llt.matrixL() * e;
    if (s > 0) xs.noalias() += phi * past.head(static_cast<Eigen::Index>(n) * s);
    x.row(s) = xs.transpose();
    // Shift the history by one block.
    if (s + 1 < T) {
      const Eigen::Index len = static_cast<Eigen::Index>(n) * s;
      past.segment(n, len) = past.head(len).eval();
      past.head(n) = xs;
    }
    return true;
  });
  return SeriesPanel(x);
}

MatrixXd fractional_integrate(const MatrixXd& y, const VectorXd& d, int filter_order) {
  const int L = static_cast<int>(y.rows());
  const int J = filter_order > 0 ? std::min(filter_order, L - 1) : L - 1;
  MatrixXd x(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    if (d[i] == 0.0) {
      x.col(i) = y.col(i);
      continue;
    }
    const std::vector<double> psi = fracint_coeffs(d[i], J);
    const std::vector<double> col(y.col(i).data(), y.col(i).data() + L);
    const std::vector<double> c = fft_convolve(psi, col, L);
    x.col(i) = Eigen::Map<const VectorXd>(c.data(), L);
  }
  return x;
}

SeriesPanel simulate_fiwn(const VectorXd& d, const VectorXd& sigma2, int T, const SimConfig& cfg) {
  const int n = static_cast<int>(d.size());
  return simulate_gnarfi({MatrixXd::Zero(n, n)}, d, sigma2, T, cfg);
}

SeriesPanel simulate_fignar(const FilterMatrices& A, const VectorXd& d, const VectorXd& sigma2,
                            int T, const SimConfig& cfg) {
  check_model(A, d, sigma2, T);
  check_cfg(cfg);
  Rng rng(cfg.seed);
  if (cfg.method == SimMethod::exact) return simulate_gaussian(fignar_acv(A, d, sigma2, T - 1), T, rng);
  MatrixXd y = white_noise(T + cfg.burn_in, sigma2, rng);
  run_recursion(A, y);
  return finish(fractional_integrate(y, d, cfg.filter_order), T);
}

SeriesPanel simulate_gnarfi(const FilterMatrices& A, const VectorXd& d, const VectorXd& sigma2,
                            int T, const SimConfig& cfg) {
  check_model(A, d, sigma2, T);
  check_cfg(cfg);
  Rng rng(cfg.seed);
  if (cfg.method == SimMethod::exact) return simulate_gaussian(gnarfi_acv(A, d, sigma2, T - 1), T, rng);
  MatrixXd x = fractional_integrate(white_noise(T + cfg.burn_in, sigma2, rng), d, cfg.filter_order);
  run_recursion(A, x);
  return finish(x, T);
}

SeriesPanel simulate_model(const Model& model, const ModelParams& par, int T, const SimConfig& cfg) {
  const FilterMatrices A = model.filters(par);
  return model.spec().kind == ModelKind::fignar ? simulate_fignar(A, par.d, par.sigma2, T, cfg)
                                                : simulate_gnarfi(A, par.d, par.sigma2, T, cfg);
}

SeriesPanel simulate_fivar(const MatrixXd& A1, const VectorXd& d, const MatrixXd& noise_cov, int T,
                           const SimConfig& cfg) {
  const int n = static_cast<int>(d.size());
  if (A1.rows() != n || A1.cols() != n || noise_cov.rows() != n || noise_cov.cols() != n)
    throw DimensionMismatch("simulate_fivar: dimensions differ");
  require_memory(d);
  check_cfg(cfg);
  if (!(spectral_radius(A1) < 1.0)) throw NotStationary("simulate_fivar: A1 is not stable");
  const Eigen::LLT<MatrixXd> llt(noise_cov);
  if (llt.info() != Eigen::Success) throw ValidationError("simulate_fivar: noise covariance not PD");
  Rng rng(cfg.seed);
  MatrixXd e = white_noise(T + cfg.burn_in, VectorXd::Ones(n), rng);
  e = (e * llt.matrixL().transpose()).eval();
  MatrixXd x = fractional_integrate(e, d, cfg.filter_order);
  run_recursion({A1}, x);
  return finish(x, T);
}

Graph builtin_graph(const std::string& name) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  std::vector<std::pair<int, int>> edges;
  int n = 0;
  if (key == "fivenet") {
    n = 5;
    edges = {{1, 4}, {1, 5}, {2, 3}, {2, 4}, {3, 4}};
  } else if (key == "tennet") {
    n = 10;
    edges = {{1, 4}, {1, 5}, {2, 3}, {2, 4}, {3, 4}, {4, 6}, {5, 8},
             {6, 9}, {6, 10}, {7, 8}, {7, 9}, {8, 9}, {9, 10}};
  } else {
    throw UnknownPreset("unknown built-in graph '" + name + "' (fivenet|tennet)");
  }
  Graph g(n);
  for (auto [a, b] : edges) g.add_edge(a - 1, b - 1);
  return g;
}

Preset dgp_preset(const std::string& name, const std::string& graph) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::toupper(c); });
  Preset pr;
  pr.name = key;
  pr.graph = builtin_graph(graph);
  const int n = pr.graph.num_nodes();
  pr.spec.order = GnarOrder{};
  pr.spec.sigma_mode = Mode::individual;

  VectorXd d(n);
  if (n == 5) {
    d << 0.05, 0.15, 0.25, 0.35, 0.45;
  } else {
    for (int i = 0; i < n; ++i) d[i] = 0.05 + 2.0 * i / 45.0;
  }

  if (key == "DGP1" || key == "DGP2") {
    pr.spec.alpha_mode = Mode::global;
    pr.params.gnar = GnarParams::zeros(n, pr.spec.order, Mode::global);
    pr.params.gnar.alpha.setConstant(0.35);
    pr.params.gnar.beta[0][0][0] = 0.2;
    if (key == "DGP2") {
      pr.spec.d_mode = Mode::global;
      d.setConstant(0.25);
    }
  } else if (key == "DGP3") {
    pr.spec.alpha_mode = Mode::individual;
    pr.params.gnar = GnarParams::zeros(n, pr.spec.order, Mode::individual);
    if (n == 5) {
      pr.params.gnar.alpha.col(0) << -0.4, 0.3, 0.3, 0.2, -0.3;
      pr.params.gnar.beta[0][0][0] = 0.4;
    } else {
      // Fixed draw satisfying the stationarity condition.
      Rng rng(20240610);
      const double beta = 0.1 + 0.3 * rng.uniform();
      for (int i = 0; i < n; ++i) pr.params.gnar.alpha(i, 0) = 0.9 * (rng.uniform() - 0.5);
      pr.params.gnar.beta[0][0][0] = beta;
    }
  } else {
    throw UnknownPreset("unknown preset '" + name + "' (DGP1|DGP2|DGP3)");
  }
  pr.params.d = d;
  pr.params.sigma2 = VectorXd::Ones(n);
  return pr;
}

}  // namespace memnet
