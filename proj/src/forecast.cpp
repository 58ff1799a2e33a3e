#include "memnet/forecast.hpp"

#include "memnet/fracdiff.hpp"
#include "memnet/levinson.hpp"
#include "memnet/parallel.hpp"

namespace memnet {

namespace {

void check_inputs(const Model& model, const SeriesPanel& data, int h) {
  if (data.N() != model.N()) throw DimensionMismatch("forecast: data and model sizes differ");
  if (data.T() < 1) throw InsufficientData("forecast: no observations");
  if (h < 1) throw ValidationError("forecast: horizon must be at least 1");
}

}  // namespace

std::string to_string(ForecastMethod m) {
  switch (m) {
    case ForecastMethod::dlf: return "DLF";
    case ForecastMethod::ef: return "EF";
    default: return "RF";
  }
}

ForecastMethod parse_forecast_method(const std::string& s) {
  if (s == "dlf" || s == "DLF") return ForecastMethod::dlf;
  if (s == "ef" || s == "EF") return ForecastMethod::ef;
  if (s == "rf" || s == "RF") return ForecastMethod::rf;
  throw ValidationError("unknown forecast method '" + s + "' (dlf|ef|rf)");
}

std::string to_string(EvalScheme s) {
  return s == EvalScheme::fixed_origin ? "fixed_origin" : "rolling_window";
}

EvalScheme parse_eval_scheme(const std::string& s) {
  if (s == "fixed_origin" || s == "fixed") return EvalScheme::fixed_origin;
  if (s == "rolling_window" || s == "rolling") return EvalScheme::rolling_window;
  throw ValidationError("unknown evaluation scheme '" + s + "' (fixed_origin|rolling_window)");
}

ForecastResult forecast_dlf(const Model& model, const ModelParams& par, const SeriesPanel& data, int h) {
  check_inputs(model, data, h);
  const int T = data.T(), n = data.N();
  const DLState st = durbin_levinson(model.acv(par, T), T);
  MatrixXd x(T + h, n);
  x.topRows(T) = data.values;
  VectorXd past(static_cast<Eigen::Index>(n) * T);
  for (int k = 0; k < h; ++k) {
    const int t = T + k;
    for (int j = 1; j <= T; ++j) past.segment(static_cast<Eigen::Index>(j - 1) * n, n) = x.row(t - j).transpose();
    x.row(t) = (st.phi * past).transpose();
  }
  return {ForecastMethod::dlf, x.bottomRows(h)};
}

ForecastResult forecast_ef(const Model& model, const ModelParams& par, const SeriesPanel& data, int h,
                           const ForecastOptions& opts) {
  check_inputs(model, data, h);
  const int T = data.T(), n = data.N();
  const Autocov acv = model.acv(par, T + h - 1);
  const BlockToeplitz op(acv, T);
  const VectorXd y = pcg_solve(op, data.stacked(), opts.pcg).solution;
  // Y(t, k) = (Sigma^{-1} x) for node k at time t.
  const Eigen::Map<const MatrixXd> Y(y.data(), T, n);
  MatrixXd pred = MatrixXd::Zero(h, n);
  for (int k = 1; k <= h; ++k)
    for (int t = 0; t < T; ++t) pred.row(k - 1).noalias() += (acv[T - 1 + k - t] * Y.row(t).transpose()).transpose();
  return {ForecastMethod::ef, pred};
}

ForecastResult forecast_rf(const Model& model, const ModelParams& par, const SeriesPanel& data, int h) {
  check_inputs(model, data, h);
  const int T = data.T(), n = data.N(), L = T + h - 1;
  const FilterMatrices A = model.filters(par);
  const int p = static_cast<int>(A.size());
  const MatrixXd D = frac_coeffs(par.d, L);
  const bool fignar = model.spec().kind == ModelKind::fignar;

  std::vector<MatrixXd> C(L + 1);
  for (int j = 1; j <= L; ++j) {
    C[j] = D.col(j).asDiagonal();
    for (int l = 1; l <= std::min(p, j); ++l) {
      if (fignar) {
        C[j].noalias() -= A[l - 1] * D.col(j - l).asDiagonal();
      } else {
        C[j].noalias() -= D.col(j - l).asDiagonal() * A[l - 1];
      }
    }
  }

  MatrixXd x(T + h, n);
  x.topRows(T) = data.values;
  for (int k = 0; k < h; ++k) {
    const int t = T + k;
    VectorXd v = VectorXd::Zero(n);
    for (int j = 1; j <= t; ++j) v.noalias() -= C[j] * x.row(t - j).transpose();
    x.row(t) = v.transpose();
  }
  return {ForecastMethod::rf, x.bottomRows(h)};
}

ForecastResult forecast(const Model& model, const ModelParams& par, const SeriesPanel& data, int h,
                        ForecastMethod method, const ForecastOptions& opts) {
  switch (method) {
    case ForecastMethod::dlf: return forecast_dlf(model, par, data, h);
    case ForecastMethod::ef: return forecast_ef(model, par, data, h, opts);
    default: return forecast_rf(model, par, data, h);
  }
}

double mspe(const MatrixXd& pred, const MatrixXd& actual) {
  if (pred.rows() != actual.rows() || pred.cols() != actual.cols())
    throw DimensionMismatch("mspe: prediction and actual sizes differ");
  if (pred.size() == 0) throw InsufficientData("mspe: nothing to compare");
  return (pred - actual).squaredNorm() / static_cast<double>(pred.size());
}

double EvalResult::mean_se(int model, ForecastMethod method, int horizon, int origin) const {
  double s = 0.0;
  int k = 0;
  for (const auto& r : records) {
    if ((model >= 0 && r.model != model) || r.method != method) continue;
    if ((horizon >= 0 && r.horizon != horizon) || (origin >= 0 && r.origin != origin)) continue;
    s += r.se;
    ++k;
  }
  if (k == 0) throw ValidationError("mean_se: no matching forecasts");
  return s / k;
}

EvalResult evaluate(const SeriesPanel& data, const std::vector<Model>& models, const EvalConfig& cfg) {
  if (models.empty()) throw ValidationError("evaluate: no models");
  if (cfg.horizon < 1) throw ValidationError("evaluate: horizon must be at least 1");
  if (cfg.methods.empty()) throw ValidationError("evaluate: no forecast methods");
  const bool rolling = cfg.scheme == EvalScheme::rolling_window;
  if (rolling && cfg.windows < 1) throw ValidationError("evaluate: windows must be at least 1");
  const int T = data.T();
  const int origins = rolling ? cfg.windows : 1;
  const int W = T - cfg.horizon - (origins - 1);
  int need = 3;
  for (const auto& m : models) {
    if (m.N() != data.N()) throw DimensionMismatch("evaluate: data and model sizes differ");
    need = std::max(need, m.spec().order.p + 3);
  }
  if (W < need) throw InsufficientData("evaluate: not enough observations to hold out");

  const int tasks = static_cast<int>(models.size()) * origins;
  std::vector<FitResult> fits(tasks);
  std::vector<std::vector<ForecastRecord>> recs(tasks);
  parallel_for(tasks, cfg.threads, [&](int task) {
    const int mi = task / origins, k = task % origins;
    const SeriesPanel train = data.slice(k, W);
    fits[task] = fit(models[mi], train, std::nullopt, cfg.fit);
    const MatrixXd actual = data.values.middleRows(k + W, cfg.horizon);
    for (ForecastMethod method : cfg.methods) {
      const ForecastResult f = forecast(models[mi], fits[task].theta, train, cfg.horizon, method, cfg.forecast);
      for (int s = 0; s < cfg.horizon; ++s) {
        ForecastRecord r;
        r.model = mi;
        r.origin = k + W;
        r.horizon = s + 1;
        r.method = method;
        r.pred = f.pred.row(s).transpose();
        r.actual = actual.row(s).transpose();
        r.se = (r.pred - r.actual).squaredNorm() / data.N();
        recs[task].push_back(std::move(r));
      }
    }
  });

  EvalResult out;
  out.origins = origins;
  out.fits = std::move(fits);
  for (auto& v : recs)
    for (auto& r : v) out.records.push_back(std::move(r));
  return out;
}

}  // namespace memnet
