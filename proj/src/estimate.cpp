#include "memnet/estimate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "memnet/autocov.hpp"
#include "memnet/fracdiff.hpp"
#include "memnet/rng.hpp"

namespace memnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// d = eps + (0.5 - 2 eps) sin^2(u) keeps d inside (0, 0.5).
constexpr double kDEps = 1e-8;

WeightMatrices weights_for(const ModelSpec& spec, const Graph& graph) {
  const int stages = std::max(spec.order.max_stage(), 1);
  return compute_weights(build_neighbour_stages(graph, stages), spec.scheme, graph);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(ModelKind k) { return k == ModelKind::fignar ? "FIGNAR" : "GNARFI"; }
std::string to_string(Estimation e) { return e == Estimation::exact ? "exact" : "conditional"; }
std::string to_string(Mode m) { return m == Mode::global ? "global" : "individual"; }

ModelKind parse_kind(const std::string& s) {
  if (s == "fignar" || s == "FIGNAR") return ModelKind::fignar;
  if (s == "gnarfi" || s == "GNARFI") return ModelKind::gnarfi;
  throw ValidationError("unknown model kind '" + s + "' (fignar|gnarfi)");
}

Estimation parse_estimation(const std::string& s) {
  if (s == "exact") return Estimation::exact;
  if (s == "conditional") return Estimation::conditional;
  throw ValidationError("unknown estimation '" + s + "' (exact|conditional)");
}

Mode parse_mode(const std::string& s) {
  if (s == "global") return Mode::global;
  if (s == "individual") return Mode::individual;
  throw ValidationError("unknown mode '" + s + "' (global|individual)");
}

void ModelSpec::validate() const {
  order.validate();
  if (estimation == Estimation::conditional && kind != ModelKind::gnarfi)
    throw ValidationError("conditional estimation is only defined for GNARFI");
}

std::string ModelSpec::label() const {
  return to_string(kind) + order.label() + " " + to_string(estimation) +
         " alpha=" + to_string(alpha_mode) + " d=" + to_string(d_mode) +
         " sigma2=" + to_string(sigma_mode);
}

int param_count(const ModelSpec& spec, int n) {
  const int p = spec.order.p;
  return (spec.alpha_mode == Mode::individual ? n * p : p) + spec.order.C * spec.order.sum_s() +
         (spec.d_mode == Mode::individual ? n : 1) + (spec.sigma_mode == Mode::individual ? n : 1);
}

Model::Model(ModelSpec spec, const Graph& graph)
    : spec_(std::move(spec)), n_(graph.num_nodes()), weights_(weights_for(spec_, graph)) {
  spec_.validate();
}

Model::Model(ModelSpec spec, WeightMatrices weights)
    : spec_(std::move(spec)), n_(weights.dim()), weights_(std::move(weights)) {
  spec_.validate();
  if (weights_.max_stage() < spec_.order.max_stage() || weights_.covariates() < spec_.order.C)
    throw DimensionMismatch("Model: weights do not cover the order");
}

FilterMatrices Model::filters(const ModelParams& par) const {
  return build_filter_matrices(par.gnar, weights_, spec_.order);
}

double Model::margin(const ModelParams& par) const {
  return stationarity_margin(par.gnar, spec_.order);
}

Autocov Model::acv(const ModelParams& par, int H) const {
  const FilterMatrices A = filters(par);
  return spec_.kind == ModelKind::fignar ? fignar_acv(A, par.d, par.sigma2, H)
                                         : gnarfi_acv(A, par.d, par.sigma2, H);
}

ParamCodec::ParamCodec(const ModelSpec& spec, int n) : spec_(spec), n_(n) {
  n_alpha_ = spec.alpha_mode == Mode::individual ? n * spec.order.p : spec.order.p;
  n_beta_ = spec.order.C * spec.order.sum_s();
  n_d_ = spec.d_mode == Mode::individual ? n : 1;
  n_s_ = spec.sigma_mode == Mode::individual ? n : 1;
  size_ = n_alpha_ + n_beta_ + n_d_ + n_s_;
}

VectorXd ParamCodec::natural(const ModelParams& par) const {
  VectorXd v(size_);
  int k = 0;
  const int p = spec_.order.p;
  if (spec_.alpha_mode == Mode::individual) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < p; ++j) v[k++] = par.gnar.alpha(i, j);
  } else {
    for (int j = 0; j < p; ++j) v[k++] = par.gnar.alpha(0, j);
  }
  for (int j = 0; j < p; ++j)
    for (int r = 0; r < spec_.order.s[j]; ++r)
      for (int c = 0; c < spec_.order.C; ++c) v[k++] = par.gnar.beta[j][r][c];
  for (int i = 0; i < n_d_; ++i) v[k++] = par.d[i];
  for (int i = 0; i < n_s_; ++i) v[k++] = par.sigma2[i];
  return v;
}

std::vector<std::string> ParamCodec::names() const {
  std::vector<std::string> out;
  const int p = spec_.order.p;
  if (spec_.alpha_mode == Mode::individual) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < p; ++j) out.push_back("alpha." + std::to_string(i + 1) + "." + std::to_string(j + 1));
  } else {
    for (int j = 0; j < p; ++j) out.push_back("alpha." + std::to_string(j + 1));
  }
  for (int j = 0; j < p; ++j)
    for (int r = 0; r < spec_.order.s[j]; ++r)
      for (int c = 0; c < spec_.order.C; ++c)
        out.push_back("beta." + std::to_string(j + 1) + "." + std::to_string(r + 1) + "." +
                      std::to_string(c + 1));
  for (int i = 0; i < n_d_; ++i) out.push_back(n_d_ == 1 ? "d" : "d." + std::to_string(i + 1));
  for (int i = 0; i < n_s_; ++i)
    out.push_back(n_s_ == 1 ? "sigma2" : "sigma2." + std::to_string(i + 1));
  return out;
}

VectorXd ParamCodec::pack(const ModelParams& par) const {
  if (par.d.size() != n_ || par.sigma2.size() != n_ || par.gnar.alpha.rows() != n_)
    throw DimensionMismatch("ParamCodec::pack: parameter dimensions do not match");
  VectorXd u = natural(par);
  for (int i = 0; i < n_d_; ++i) {
    double& x = u[n_alpha_ + n_beta_ + i];
    if (!(x > 0.0 && x < 0.5)) throw ValidationError("memory parameter outside (0, 0.5)");
    x = std::asin(std::sqrt(std::clamp((x - kDEps) / (0.5 - 2.0 * kDEps), 0.0, 1.0)));
  }
  for (int i = 0; i < n_s_; ++i) {
    double& x = u[n_alpha_ + n_beta_ + n_d_ + i];
    if (!(x > 0.0)) throw NonPositiveVariance("variance must be positive");
    x = std::log(x);
  }
  return u;
}

ModelParams ParamCodec::unpack(const VectorXd& u) const {
  if (u.size() != size_) throw DimensionMismatch("ParamCodec::unpack: wrong vector length");
  ModelParams par;
  par.gnar = GnarParams::zeros(n_, spec_.order, spec_.alpha_mode);
  const int p = spec_.order.p;
  int k = 0;
  if (spec_.alpha_mode == Mode::individual) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < p; ++j) par.gnar.alpha(i, j) = u[k++];
  } else {
    for (int j = 0; j < p; ++j) par.gnar.alpha.col(j).setConstant(u[k++]);
  }
  for (int j = 0; j < p; ++j)
    for (int r = 0; r < spec_.order.s[j]; ++r)
      for (int c = 0; c < spec_.order.C; ++c) par.gnar.beta[j][r][c] = u[k++];
  par.d.resize(n_);
  par.sigma2.resize(n_);
  for (int i = 0; i < n_; ++i) {
    const double sn = std::sin(u[k + (n_d_ == 1 ? 0 : i)]);
    par.d[i] = kDEps + (0.5 - 2.0 * kDEps) * sn * sn;
  }
  k += n_d_;
  for (int i = 0; i < n_; ++i) par.sigma2[i] = std::exp(u[k + (n_s_ == 1 ? 0 : i)]);
  return par;
}

double negloglik_exact(const Model& model, const ModelParams& par, const SeriesPanel& data,
                       const LoglikOptions& opts) {
  if (data.N() != model.N()) throw DimensionMismatch("negloglik: data and model sizes differ");
  return -gaussian_loglik(model.acv(par, data.T() - 1), data, opts);
}

double negloglik_cond_gnarfi(const Model& model, const ModelParams& par, const SeriesPanel& data) {
  const int T = data.T(), n = data.N();
  if (n != model.N()) throw DimensionMismatch("negloglik: data and model sizes differ");
  require_memory(par.d);
  require_variances(par.sigma2);
  const FilterMatrices A = model.filters(par);
  const MatrixXd& x = data.values;
  MatrixXd z = x;
  for (int j = 1; j <= static_cast<int>(A.size()); ++j)
    for (int t = j; t < T; ++t) z.row(t).noalias() -= x.row(t - j) * A[j - 1].transpose();

  // Independent scalar FIWN per node: innovations form of the Gaussian likelihood.
  double ll = -0.5 * T * n * std::log(2.0 * std::numbers::pi);
  std::vector<double> phi(T), prev(T);
  for (int i = 0; i < n; ++i) {
    const std::vector<double> g = fiwn_cross_acv_seq(par.d[i], par.d[i], T);
    double v = par.sigma2[i] * g[0];
    std::fill(phi.begin(), phi.end(), 0.0);
    for (int t = 0; t < T; ++t) {
      double pred = 0.0;
      for (int j = 1; j <= t; ++j) pred += phi[j] * z(t - j, i);
      const double e = z(t, i) - pred;
      ll -= 0.5 * (std::log(v) + e * e / v);
      if (t + 1 == T) break;
      // Levinson update to order t + 1 (unit-variance gamma, v scaled).
      double num = g[t + 1];
      for (int j = 1; j <= t; ++j) num -= phi[j] * g[t + 1 - j];
      const double k = num / (v / par.sigma2[i]);
      std::copy(phi.begin(), phi.begin() + t + 1, prev.begin());
      for (int j = 1; j <= t; ++j) phi[j] = prev[j] - k * prev[t + 1 - j];
      phi[t + 1] = k;
      v *= 1.0 - k * k;
      if (!(v > 0.0)) throw NotPositiveDefinite("conditional likelihood: innovation variance", t + 1);
    }
  }
  return -ll;
}

double negloglik(const Model& model, const ModelParams& par, const SeriesPanel& data,
                 const LoglikOptions& opts) {
  return model.spec().estimation == Estimation::conditional
             ? negloglik_cond_gnarfi(model, par, data)
             : negloglik_exact(model, par, data, opts);
}

InformationCriteria information_criteria(double loglik, int M, double T) {
  return {-2.0 * loglik + M * std::log(T), -2.0 * loglik + 2.0 * M};
}

ModelParams default_init(const Model& model, const SeriesPanel& data) {
  const ModelSpec& spec = model.spec();
  const int n = model.N(), T = data.T();
  if (data.N() != n) throw DimensionMismatch("default_init: data and model sizes differ");
  if (T < 3) throw InsufficientData("default_init: need at least 3 observations");
  ModelParams par;
  par.gnar = GnarParams::zeros(n, spec.order, spec.alpha_mode);
  const double v = 0.1 / (spec.order.p * (1 + spec.order.max_stage()));
  par.gnar.alpha.setConstant(v);
  for (auto& bj : par.gnar.beta)
    for (auto& br : bj)
      for (double& b : br) b = v;
  par.d = VectorXd::Constant(n, 0.25);
  const MatrixXd dx = data.values.bottomRows(T - 1) - data.values.topRows(T - 1);
  par.sigma2.resize(n);
  for (int i = 0; i < n; ++i) {
    const double m = dx.col(i).mean();
    par.sigma2[i] = (dx.col(i).array() - m).square().sum() / (T - 2);
  }
  if (spec.sigma_mode == Mode::global) par.sigma2.setConstant(par.sigma2.mean());
  if (!(par.sigma2.minCoeff() > 0.0))
    throw InfeasibleInit("default_init: a differenced series has zero variance");
  return par;
}

namespace {

struct Objective {
  const Model& model;
  const SeriesPanel& data;
  const ParamCodec& codec;
  const FitOptions& opts;
  int evals = 0;

  double operator()(const VectorXd& u) {
    ++evals;
    if (!u.allFinite()) return kInf;
    const ModelParams par = codec.unpack(u);
    const double S = model.margin(par);
    if (S >= 1.0) return kInf;
    double barrier = 0.0;
    if (S >= opts.barrier_start) barrier = 1e6 * (S - opts.barrier_start) * (S - opts.barrier_start);
    try {
      const double f = negloglik(model, par, data, opts.lik);
      return std::isfinite(f) ? f + barrier : kInf;
    } catch (const Error&) {
      return kInf;
    }
  }
};

VectorXd fd_gradient(Objective& f, const VectorXd& u, double fu) {
  VectorXd g(u.size());
  VectorXd w = u;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double h = 1e-5 * (1.0 + std::abs(u[k]));
    w[k] = u[k] + h;
    const double fp = f(w);
    w[k] = u[k] - h;
    const double fm = f(w);
    w[k] = u[k];
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g[k] = (fp - fm) / (2 * h);
    } else if (std::isfinite(fp)) {
      g[k] = (fp - fu) / h;
    } else if (std::isfinite(fm)) {
      g[k] = (fu - fm) / h;
    } else {
      g[k] = 0.0;
    }
  }
  return g;
}

struct BfgsRun {
  VectorXd u;
  double f = kInf;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Armijo backtracking; returns the accepted step or 0.
double backtrack(Objective& f, const VectorXd& u, double f0, const VectorXd& dir, double slope,
                 double a, double& fa) {
  for (int k = 0; k < 40; ++k, a *= 0.5) {
    fa = f(u + a * dir);
    if (std::isfinite(fa) && fa <= f0 + 1e-4 * a * slope) return a;
  }
  return 0.0;
}

BfgsRun bfgs(Objective& f, VectorXd u, const FitOptions& opts) {
  BfgsRun run;
  double fu = f(u);
  if (!std::isfinite(fu)) {
    run.u = u;
    return run;
  }
  VectorXd g = fd_gradient(f, u, fu);
  const Eigen::Index m = u.size();
  MatrixXd H = MatrixXd::Identity(m, m);
  bool fresh = true;
  for (int it = 0; it < opts.max_iter; ++it) {
    if (g.cwiseAbs().maxCoeff() <= 1e-5 * (1.0 + std::abs(fu))) {
      run.converged = true;
      break;
    }
    VectorXd dir = -H * g;
    if (g.dot(dir) >= 0.0) {
      H.setIdentity();
      fresh = true;
      dir = -g;
    }
    const double amax = (fresh ? 0.1 : 1.0) / dir.cwiseAbs().maxCoeff();
    double fn = kInf;
    const double a = backtrack(f, u, fu, dir, g.dot(dir), std::min(1.0, amax), fn);
    ++run.iterations;
    if (!(a > 0.0)) {
      if (!fresh) {
        H.setIdentity();
        fresh = true;
        continue;
      }
      break;
    }
    const VectorXd un = u + a * dir;
    const VectorXd s = un - u;
    const double df = fu - fn;
    const VectorXd gn = fd_gradient(f, un, fn);
    const VectorXd y = gn - g;
    u = un;
    fu = fn;
    g = gn;
    run.trace.push_back(fu);
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      if (fresh) {
        H *= sy / y.squaredNorm();
        fresh = false;
      }
      const double rho = 1.0 / sy;
      const VectorXd Hy = H * y;
      H += ((sy + y.dot(Hy)) * rho * rho) * (s * s.transpose()) -
           rho * (Hy * s.transpose() + s * Hy.transpose());
    }
    if (df < opts.tol * (1.0 + std::abs(fu)) &&
        s.cwiseAbs().maxCoeff() < 1e-4 * (1.0 + u.cwiseAbs().maxCoeff())) {
      run.converged = true;
      break;
    }
  }
  run.u = u;
  run.f = fu;
  return run;
}

}  // namespace

FitResult fit(const Model& model, const SeriesPanel& data, const std::optional<ModelParams>& init,
              const FitOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (data.N() != model.N()) throw DimensionMismatch("fit: data and model sizes differ");
  const int T = data.T();
  if (T <= model.spec().order.p + 2) throw InsufficientData("fit: series too short for the order");
  const ParamCodec codec(model.spec(), model.N());
  const ModelParams start = init ? *init : default_init(model, data);
  if (model.margin(start) >= opts.barrier_start)
    throw InfeasibleInit("fit: initial parameters violate the stationarity condition");
  VectorXd u0;
  try {
    u0 = codec.pack(start);
  } catch (const ValidationError& e) {
    throw InfeasibleInit(std::string("fit: ") + e.what());
  }
  Objective f{model, data, codec, opts};
  if (!std::isfinite(f(u0))) throw InfeasibleInit("fit: objective is not finite at the initial point");

  BfgsRun best = bfgs(f, u0, opts);
  bool restarted = false;
  if (!best.converged && opts.restart) {
    Rng rng(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(T));
    VectorXd u1 = best.u;
    for (Eigen::Index k = 0; k < u1.size(); ++k) u1[k] += 0.05 * rng.normal();
    if (!std::isfinite(f(u1))) u1 = u0;
    BfgsRun second = bfgs(f, u1, opts);
    second.iterations += best.iterations;
    second.trace.insert(second.trace.begin(), best.trace.begin(), best.trace.end());
    restarted = true;
    if (second.converged || second.f < best.f) {
      best = std::move(second);
    } else {
      best.iterations = second.iterations;
    }
  }

  FitResult res;
  res.theta = codec.unpack(best.u);
  res.iterations = best.iterations;
  res.converged = best.converged;
  res.restarted = restarted;
  res.trace = std::move(best.trace);
  res.M = param_count(model.spec(), model.N());
  res.T = T;
  res.loglik = -negloglik(model, res.theta, data, opts.lik);
  const auto ic = information_criteria(res.loglik, res.M, T);
  res.bic = ic.bic;
  res.aic = ic.aic;
  if (model.spec().estimation == Estimation::exact) res.m_trunc = model.acv(res.theta, 0).m_trunc;
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::string fit_report(const Model& model, const FitResult& res) {
  const ModelSpec& spec = model.spec();
  const int n = model.N(), p = spec.order.p;
  std::ostringstream os;
  os << "model=" << to_string(spec.kind) << "\n";
  os << "estimation=" << to_string(spec.estimation) << "\n";
  os << "order=" << spec.order.label() << "\n";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j)
      os << "alpha." << i + 1 << "." << j + 1 << "=" << fmt(res.theta.gnar.alpha(i, j)) << "\n";
  for (int j = 0; j < p; ++j)
    for (int r = 0; r < spec.order.s[j]; ++r)
      for (int c = 0; c < spec.order.C; ++c)
        os << "beta." << j + 1 << "." << r + 1 << "." << c + 1 << "="
           << fmt(res.theta.gnar.beta[j][r][c]) << "\n";
  for (int i = 0; i < n; ++i) os << "d." << i + 1 << "=" << fmt(res.theta.d[i]) << "\n";
  for (int i = 0; i < n; ++i) os << "sigma2." << i + 1 << "=" << fmt(res.theta.sigma2[i]) << "\n";
  os << "loglik=" << fmt(res.loglik) << "\n";
  os << "bic=" << fmt(res.bic) << "\n";
  os << "aic=" << fmt(res.aic) << "\n";
  os << "M=" << res.M << "\n";
  os << "T=" << res.T << "\n";
  os << "converged=" << (res.converged ? "true" : "false") << "\n";
  os << "iterations=" << res.iterations << "\n";
  os << "m_trunc=" << res.m_trunc << "\n";
  os << "wall_seconds=" << fmt(res.wall_seconds) << "\n";
  return os.str();
}

}  // namespace memnet
